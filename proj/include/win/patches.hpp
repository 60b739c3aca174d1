#pragma once

#include <vector>

#include "win/image.hpp"
#include "win/tensor.hpp"

namespace win {

struct PatchProvenance {
    int image = 0;  // corpus index of the source image
    int top = 0;
    int left = 0;
    int aug = 0;    // dihedral code applied after extraction, 0 = none
};

struct PatchSet {
    Tensor patches;  // (N, 1, s, s)
    std::vector<PatchProvenance> provenance;
};

// Fully in-bounds patches at top-left positions {0, t, 2t, ...} on both
// axes; count = (floor((h-s)/t)+1) * (floor((w-s)/t)+1).
PatchSet extract_patches(const GrayImage& img, int size, int stride);

// The 8 dihedral transforms of a square patch: code & 3 selects the number
// of 90-degree clockwise rotations, code & 4 a horizontal flip applied
// first. Code 0 is the identity. Works per plane on any (n, c, s, s).
Tensor augment(const Tensor& patch, int code);

}  // namespace win
