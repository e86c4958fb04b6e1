#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sqlgen/gatenet/serialize.hpp"
#include "synthetic.hpp"

namespace sqlgen::gatenet {
namespace {

using sqlgen::testing::read_file;
using sqlgen::testing::TempDir;
using sqlgen::testing::write_file;

GateConfig config() {
    GateConfig cfg;
    cfg.d_model = 6;
    cfg.vocab_size = 11;
    cfg.max_src_len = 7;
    cfg.max_tgt_len = 5;
    cfg.seed = 21;
    cfg.shared_embedding_from = 9;
    return cfg;
}

TEST(Serialize, RoundTripIsExact) {
    TempDir dir;
    const auto cfg = config();
    const auto params = init_params(cfg);
    save_params(dir / "p.bin", dir / "p.json", cfg, params);
    const auto loaded = load_params(dir / "p.bin", dir / "p.json");
    EXPECT_EQ(loaded.config.d_model, cfg.d_model);
    EXPECT_EQ(loaded.config.vocab_size, cfg.vocab_size);
    EXPECT_EQ(loaded.config.shared_embedding_from, cfg.shared_embedding_from);
    EXPECT_EQ(loaded.config.seed, cfg.seed);
    std::vector<const Matrix*> a, b;
    params.for_each([&](const char*, const Matrix& m) { a.push_back(&m); });
    loaded.params.for_each([&](const char*, const Matrix& m) { b.push_back(&m); });
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);

    const auto side = nlohmann::json::parse(read_file(dir / "p.json"));
    EXPECT_EQ(side["total_values"], params.parameter_count());
    EXPECT_EQ(side["tensors"][0]["name"], "enc.tok");
    const auto blob = read_file(dir / "p.bin");
    EXPECT_EQ(blob.substr(0, 8), "GATEPRM1");
    EXPECT_EQ(blob.size(), 16 + 8 * params.parameter_count());
}

TEST(Serialize, RejectsCorruptInput) {
    TempDir dir;
    const auto cfg = config();
    save_params(dir / "p.bin", dir / "p.json", cfg, init_params(cfg));
    const std::string blob = read_file(dir / "p.bin");

    std::string bad_magic = blob;
    bad_magic[0] = 'X';
    write_file(dir / "m.bin", bad_magic);
    EXPECT_THROW(load_params(dir / "m.bin", dir / "p.json"), std::runtime_error);

    std::string bad_version = blob;
    bad_version[8] = 2;
    write_file(dir / "v.bin", bad_version);
    EXPECT_THROW(load_params(dir / "v.bin", dir / "p.json"), std::runtime_error);

    write_file(dir / "t.bin", blob.substr(0, blob.size() - 8));
    EXPECT_THROW(load_params(dir / "t.bin", dir / "p.json"), std::runtime_error);

    auto side = nlohmann::json::parse(read_file(dir / "p.json"));
    side["tensors"][2]["rows"] = 99;
    write_file(dir / "s.json", side.dump());
    EXPECT_THROW(load_params(dir / "p.bin", dir / "s.json"), std::runtime_error);

    EXPECT_THROW(load_params(dir / "missing.bin", dir / "p.json"), std::runtime_error);
}

}  // namespace
}  // namespace sqlgen::gatenet
