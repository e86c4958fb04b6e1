#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sqlgen {

/// Seeded random source with platform-independent draws.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so bounded integers and unit doubles are derived
/// here directly from the raw engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a master seed and a key
/// (FNV-1a over the key, mixed with splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::string_view key);

}  // namespace sqlgen
