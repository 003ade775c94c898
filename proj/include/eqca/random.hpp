#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace eqca {

// splitmix64 finalizer; used to derive independent per-sample seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Generator for sample `index` of a run seeded with `seed`. Streams depend
/// only on (seed, index), never on scheduling.
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
    return std::mt19937_64(mix64(mix64(seed ^ mix64(salt)) + index));
}

// Uniform in [0, 1) with 53 random bits.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform in [0, n) without modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = rng();
    while (v >= limit);
    return v % n;
}

}  // namespace eqca
