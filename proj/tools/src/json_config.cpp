#include "sqlgen_cli/json_config.hpp"

#include <nlohmann/json.hpp>

namespace sqlgen::cli {

namespace {

using nlohmann::json;

void flatten(const json& j, const std::string& name, const std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
        std::vector<std::string> next = parents;
        if (!name.empty()) next.push_back(name);
        for (const auto& [key, value] : j.items()) flatten(value, key, next, out);
        return;
    }
    if (name.empty()) throw CLI::ConversionError("JSON config must be an object");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = parents;
    auto scalar = [&](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("unsupported JSON value for '" + item.fullname() + "'");
    };
    if (j.is_array()) {
        for (const auto& v : j) item.inputs.push_back(scalar(v));
    } else {
        item.inputs.push_back(scalar(j));
    }
    out.push_back(std::move(item));
}

json dump_app(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
        if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
        const std::string& key = opt->get_lnames().front();
        if (opt->count() > 0) {
            const auto& results = opt->results();
            if (opt->get_type_size() == 0) {
                j[key] = true;
            } else if (results.size() == 1) {
                j[key] = results.front();
            } else {
                j[key] = results;
            }
        } else if (default_also && !opt->get_default_str().empty()) {
            j[key] = opt->get_default_str();
        }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
        if (!default_also && sub->count() == 0) continue;
        json nested = dump_app(sub, default_also);
        if (!nested.empty()) j[sub->get_name()] = std::move(nested);
    }
    return j;
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool /*write_description*/,
                                  std::string /*prefix*/) const {
    return dump_app(app, default_also).dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
    json j;
    try {
        j = json::parse(input);
    } catch (const json::parse_error& e) {
        throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, "", {}, items);
    return items;
}

}  // namespace sqlgen::cli
