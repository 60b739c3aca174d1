#pragma once

#include <vector>

#include "win/tensor.hpp"

namespace win {

// 2-D convolution parameters. Convolution here is cross-correlation (no
// kernel flip) with zero padding of (f-1)/2 per side, so spatial size is
// preserved for every odd kernel.
struct ConvParams {
    Tensor weights;           // (k_out, k_in, f, f)
    std::vector<float> bias;  // k_out
    int padding = 0;

    int out_channels() const { return weights.n; }
    int in_channels() const { return weights.c; }
    int kernel() const { return weights.h; }

    // Zero-initialized parameters with "same" padding wired up.
    static ConvParams make(int k_out, int k_in, int f);

    void validate() const;
};

Tensor conv2d_forward(const Tensor& input, const ConvParams& p);

struct ConvGrads {
    Tensor input;
    Tensor weights;
    std::vector<float> bias;
};

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input, const ConvParams& p);

}  // namespace win
