#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace win {

// Rank-4 NCHW single-precision array. The one carrier for images, feature
// maps, weights and gradients; data is contiguous row-major.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, float fill = 0.0f);

    std::int64_t numel() const { return static_cast<std::int64_t>(n) * c * h * w; }
    bool empty() const { return data.empty(); }
    bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
    std::string shape_str() const;

    std::int64_t plane_size() const { return static_cast<std::int64_t>(h) * w; }
    float* plane(int in, int ic) { return data.data() + (static_cast<std::int64_t>(in) * c + ic) * plane_size(); }
    const float* plane(int in, int ic) const {
        return data.data() + (static_cast<std::int64_t>(in) * c + ic) * plane_size();
    }

    float& at(int in, int ic, int y, int x) { return plane(in, ic)[static_cast<std::int64_t>(y) * w + x]; }
    float at(int in, int ic, int y, int x) const { return plane(in, ic)[static_cast<std::int64_t>(y) * w + x]; }

    bool all_finite() const;
};

// Throws std::invalid_argument naming both shapes when they differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* op);

}  // namespace win
