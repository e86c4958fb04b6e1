#include <gtest/gtest.h>

#include <sstream>

#include "sqlgen_cli/json_config.hpp"

namespace sqlgen::cli {
namespace {

std::vector<CLI::ConfigItem> parse(const std::string& text) {
    std::istringstream in(text);
    return JsonConfig().from_config(in);
}

const CLI::ConfigItem& item(const std::vector<CLI::ConfigItem>& items, const std::string& name) {
    for (const auto& i : items) {
        if (i.name == name) return i;
    }
    throw std::out_of_range(name);
}

TEST(JsonConfig, NestedObjectsBecomeParents) {
    const auto items = parse(R"({"seed": 4, "gate": {"train": {"steps": 200, "generate-only": true}}})");
    ASSERT_EQ(items.size(), 3u);
    EXPECT_TRUE(item(items, "seed").parents.empty());
    EXPECT_EQ(item(items, "seed").inputs, std::vector<std::string>{"4"});
    EXPECT_EQ(item(items, "steps").parents, (std::vector<std::string>{"gate", "train"}));
    EXPECT_EQ(item(items, "steps").inputs, std::vector<std::string>{"200"});
    EXPECT_EQ(item(items, "generate-only").inputs, std::vector<std::string>{"true"});
}

TEST(JsonConfig, ArraysAndNumbers) {
    const auto items = parse(R"({"xs": [1, "b", 2.5], "lr": 0.05})");
    ASSERT_EQ(items.size(), 2u);
    EXPECT_EQ(item(items, "xs").inputs, (std::vector<std::string>{"1", "b", "2.5"}));
    EXPECT_EQ(item(items, "lr").inputs, std::vector<std::string>{"0.05"});
}

TEST(JsonConfig, RejectsBadInput) {
    EXPECT_THROW(parse("[1, 2]"), CLI::ConversionError);
    EXPECT_THROW(parse("{bad"), CLI::ConversionError);
    EXPECT_THROW(parse(R"({"a": null})"), CLI::ConversionError);
}

TEST(JsonConfig, DumpsSetOptions) {
    CLI::App app;
    int n = 0;
    auto* sub = app.add_subcommand("silver");
    sub->add_option("--n", n);
    app.config_formatter(std::make_shared<JsonConfig>());
    const char* argv[] = {"app", "silver", "--n", "5"};
    app.parse(4, argv);
    const std::string dumped = app.config_to_str(false, false);
    const auto items = parse(dumped);
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].parents, std::vector<std::string>{"silver"});
    EXPECT_EQ(items[0].inputs, std::vector<std::string>{"5"});
}

}  // namespace
}  // namespace sqlgen::cli
