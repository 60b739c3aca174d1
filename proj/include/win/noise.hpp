#pragma once

#include <cstdint>

#include "win/image.hpp"

namespace win {

// Supervised unit: clean image, its AWGN-corrupted version, and the noise
// level that produced it. sigma lives on the conventional 0..255 scale.
struct ImagePair {
    GrayImage clean;
    GrayImage noisy;
    float sigma = 0.0f;
    std::uint64_t seed = 0;
};

// noisy = clean + g, g ~ i.i.d. N(0, (sigma/255)^2), not clipped.
// Deterministic per (seed, shape). Throws std::invalid_argument on
// negative sigma.
ImagePair add_awgn(const GrayImage& clean, float sigma, std::uint64_t seed);

}  // namespace win
