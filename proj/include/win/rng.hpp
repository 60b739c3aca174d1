#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace win {

// splitmix64: cheap bijective mixer, used to derive independent sub-seeds
// from one user seed so every pipeline stage is reproducible in isolation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ b);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(seed_mix(a, b) ^ c);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// i.i.d. N(0, stddev^2) samples; stddev == 0 writes zeros without consuming
// engine state (normal_distribution requires a positive stddev).
inline void fill_gaussian(std::mt19937_64& rng, float stddev, std::span<float> out) {
    if (stddev <= 0.0f) {
        for (float& x : out) x = 0.0f;
        return;
    }
    std::normal_distribution<float> dist(0.0f, stddev);
    for (float& x : out) x = dist(rng);
}

}  // namespace win
