#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace emistrip {

/// Deterministic uniform draws on top of mt19937_64. std::uniform_int_distribution
/// is implementation-defined, so bounded draws are done by rejection here to keep
/// outputs identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound); bound > 0.
    std::uint64_t next_below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// FNV-1a over the seed bytes then the id bytes. Used to derive stable
/// per-image seeds so adding or removing inputs never reshuffles the others.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view image_id);

} // namespace emistrip
