#include "sqlgen/gatenet/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sqlgen::gatenet {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'A', 'T', 'E', 'P', 'R', 'M', '1'};
constexpr const char* kFormatName = "gatenet-params";

template <typename U>
void put_le(std::string& out, U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

template <typename U>
U get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(U) > in.size()) throw std::runtime_error("params blob is truncated");
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        value |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    }
    pos += sizeof(U);
    return value;
}

nlohmann::ordered_json config_json(const GateConfig& cfg) {
    nlohmann::ordered_json j;
    j["d_model"] = cfg.d_model;
    j["vocab_size"] = cfg.vocab_size;
    j["max_src_len"] = cfg.max_src_len;
    j["max_tgt_len"] = cfg.max_tgt_len;
    j["seed"] = cfg.seed;
    j["ff_hidden"] = cfg.ff_hidden;
    j["shared_embedding_from"] = cfg.shared_embedding_from;
    j["bos_id"] = cfg.bos_id;
    j["mode"] = cfg.mode == GateMode::kGated ? "gated" : "generate_only";
    return j;
}

GateConfig config_from_json(const nlohmann::json& j) {
    GateConfig cfg;
    cfg.d_model = j.at("d_model").get<std::size_t>();
    cfg.vocab_size = j.at("vocab_size").get<std::size_t>();
    cfg.max_src_len = j.at("max_src_len").get<std::size_t>();
    cfg.max_tgt_len = j.at("max_tgt_len").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.ff_hidden = j.at("ff_hidden").get<std::size_t>();
    cfg.shared_embedding_from = j.at("shared_embedding_from").get<std::size_t>();
    cfg.bos_id = j.at("bos_id").get<int>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "gated") cfg.mode = GateMode::kGated;
    else if (mode == "generate_only") cfg.mode = GateMode::kGenerateOnly;
    else throw std::runtime_error("unknown gate mode '" + mode + "'");
    cfg.validate();
    return cfg;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string config_to_json(const GateConfig& cfg) { return config_json(cfg).dump(); }

void save_params(const std::filesystem::path& blob, const std::filesystem::path& sidecar,
                 const GateConfig& cfg, const ModelParams& params) {
    std::string bytes(kMagic.begin(), kMagic.end());
    put_le<std::uint32_t>(bytes, kParamsFormatVersion);
    std::uint32_t count = 0;
    params.for_each([&](const char*, const Matrix&) { ++count; });
    put_le<std::uint32_t>(bytes, count);

    nlohmann::ordered_json meta;
    meta["format"] = kFormatName;
    meta["version"] = kParamsFormatVersion;
    meta["config"] = config_json(cfg);
    auto tensors = nlohmann::ordered_json::array();
    std::size_t offset = 0;
    params.for_each([&](const char* name, const Matrix& m) {
        tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
        offset += m.size();
        for (double v : m.values()) put_le<std::uint64_t>(bytes, std::bit_cast<std::uint64_t>(v));
    });
    meta["tensors"] = std::move(tensors);
    meta["total_values"] = offset;

    write_file(blob, bytes);
    write_file(sidecar, meta.dump(2) + "\n");
}

LoadedParams load_params(const std::filesystem::path& blob, const std::filesystem::path& sidecar) {
    const auto meta = nlohmann::json::parse(read_file(sidecar));
    if (meta.at("format").get<std::string>() != kFormatName) {
        throw std::runtime_error("sidecar is not a gatenet params description");
    }
    const auto version = meta.at("version").get<std::uint32_t>();
    if (version != kParamsFormatVersion) {
        throw std::runtime_error("unsupported params version " + std::to_string(version));
    }
    LoadedParams loaded;
    loaded.config = config_from_json(meta.at("config"));
    loaded.params = zero_params(loaded.config);

    const std::string bytes = read_file(blob);
    if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw std::runtime_error("params blob has a bad magic number");
    }
    std::size_t pos = kMagic.size();
    if (get_le<std::uint32_t>(bytes, pos) != version) {
        throw std::runtime_error("params blob and sidecar disagree on version");
    }
    const auto count = get_le<std::uint32_t>(bytes, pos);
    const auto& tensors = meta.at("tensors");
    if (count != tensors.size()) throw std::runtime_error("params blob tensor count mismatch");

    std::size_t index = 0;
    bool counted = true;
    loaded.params.for_each([&](const char* name, Matrix& m) {
        if (index >= tensors.size()) {
            counted = false;
            return;
        }
        const auto& t = tensors[index++];
        if (t.at("name").get<std::string>() != name || t.at("rows").get<std::size_t>() != m.rows() ||
            t.at("cols").get<std::size_t>() != m.cols()) {
            throw std::runtime_error(std::string("params tensor mismatch at ") + name);
        }
        for (double& v : m.values()) v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
    });
    if (!counted || index != tensors.size()) throw std::runtime_error("params tensor count mismatch");
    if (pos != bytes.size()) throw std::runtime_error("params blob has trailing bytes");
    return loaded;
}

}  // namespace sqlgen::gatenet
