#pragma once

#include <filesystem>
#include <string>

#include "sqlgen/gatenet/model.hpp"

namespace sqlgen::gatenet {

inline constexpr std::uint32_t kParamsFormatVersion = 1;

/// Writes every tensor as little-endian doubles after an 8-byte magic and a
/// version word, plus a JSON sidecar listing config, names, shapes and offsets.
void save_params(const std::filesystem::path& blob, const std::filesystem::path& sidecar,
                 const GateConfig& cfg, const ModelParams& params);

struct LoadedParams {
    GateConfig config;
    ModelParams params;
};

/// Throws std::runtime_error on a version, magic or shape mismatch.
LoadedParams load_params(const std::filesystem::path& blob, const std::filesystem::path& sidecar);

std::string config_to_json(const GateConfig& cfg);

}  // namespace sqlgen::gatenet
