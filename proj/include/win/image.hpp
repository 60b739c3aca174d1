#pragma once

#include <string>
#include <vector>

#include "win/tensor.hpp"

namespace win {

// Grayscale image with values in [0,1] when decoded from disk. Values may
// leave that range in intermediate computation (noise is never clipped);
// clipping happens only at save and metric time.
struct GrayImage {
    int h = 0, w = 0;
    std::vector<float> v;

    GrayImage() = default;
    GrayImage(int h_, int w_, float fill = 0.0f);

    float& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
    float at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
    std::int64_t pixels() const { return static_cast<std::int64_t>(h) * w; }
};

// Reads 8-bit P5 PGM (maxval 255) or 8-bit grayscale/RGB PNG; RGB is reduced
// by luminance 0.299 R + 0.587 G + 0.114 B. Values are scaled by /255.
GrayImage load_gray(const std::string& path);

// Clips to [0,1], quantizes as round(v*255), writes PGM or PNG by extension.
void save_gray(const GrayImage& img, const std::string& path);

GrayImage clipped(const GrayImage& img);

Tensor to_tensor(const GrayImage& img);               // 1 x 1 x h x w
GrayImage to_image(const Tensor& t, int n = 0, int c = 0);

// Corpus manifest: one image path per line, '#' comments and blank lines
// ignored. Relative entries resolve against the manifest's directory.
std::vector<std::string> read_manifest(const std::string& path);

// "img.png" -> "img"
std::string path_stem(const std::string& path);

}  // namespace win
