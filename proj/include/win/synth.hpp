#pragma once

#include <cstdint>

#include "win/image.hpp"

namespace win {

// Seeded generator of natural-looking grayscale fixtures: a smooth shaded
// background, soft-edged ellipses and rectangles at varied intensities, and
// mild smoothed texture. Different seeds give images with clearly different
// pixel distributions, which is what the histogram tooling and the training
// gates need from a corpus when no external dataset is available.
struct SynthConfig {
    int h = 256;
    int w = 256;
    float lo = 0.1f;   // pixel value range of the result
    float hi = 0.9f;
    int shapes = 7;
    float texture = 0.02f;  // texture noise amplitude before smoothing
};

GrayImage synth_image(std::uint64_t seed, const SynthConfig& cfg = {});

}  // namespace win
