#include "win/conv.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "win/parallel.hpp"

namespace win {
namespace {

// Reduction helper with a fixed combine order; the lane layout keeps the
// loop vectorizable without reassociation flags.
float dot_rows(const float* a, const float* b, int len) {
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int i = 0;
    for (; i + 8 <= len; i += 8) {
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
        acc[4] += a[i + 4] * b[i + 4];
        acc[5] += a[i + 5] * b[i + 5];
        acc[6] += a[i + 6] * b[i + 6];
        acc[7] += a[i + 7] * b[i + 7];
    }
    for (; i < len; ++i) acc[0] += a[i] * b[i];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

}  // namespace

ConvParams ConvParams::make(int k_out, int k_in, int f) {
    ConvParams p;
    p.weights = Tensor(k_out, k_in, f, f);
    p.bias.assign(static_cast<std::size_t>(k_out), 0.0f);
    p.padding = (f - 1) / 2;
    return p;
}

void ConvParams::validate() const {
    const int f = kernel();
    if (weights.h != weights.w) {
        throw std::invalid_argument("conv weights must be square, got " + weights.shape_str());
    }
    if (f % 2 == 0) {
        throw std::invalid_argument("conv kernel size must be odd, got " + std::to_string(f));
    }
    if (padding != (f - 1) / 2) {
        throw std::invalid_argument("conv padding must be (F-1)/2 = " + std::to_string((f - 1) / 2) +
                                    ", got " + std::to_string(padding));
    }
    if (static_cast<int>(bias.size()) != out_channels()) {
        throw std::invalid_argument("conv bias length " + std::to_string(bias.size()) +
                                    " does not match output channels " + std::to_string(out_channels()));
    }
}

Tensor conv2d_forward(const Tensor& input, const ConvParams& p) {
    p.validate();
    if (input.c != p.in_channels()) {
        throw std::invalid_argument("conv2d_forward: input has " + std::to_string(input.c) +
                                    " channels, weights expect " + std::to_string(p.in_channels()));
    }
    const int f = p.kernel(), pad = p.padding;
    const int h = input.h, w = input.w;
    const int k_out = p.out_channels(), k_in = p.in_channels();
    Tensor out(input.n, k_out, h, w);

    parallel_for(static_cast<std::int64_t>(input.n) * k_out, [&](std::int64_t begin, std::int64_t end) {
        // double accumulator plane per worker; rounded to f32 once per task
        std::vector<double> acc(static_cast<std::size_t>(out.plane_size()));
        for (std::int64_t task = begin; task < end; ++task) {
            const int in = static_cast<int>(task / k_out);
            const int k = static_cast<int>(task % k_out);
            std::fill(acc.begin(), acc.end(), static_cast<double>(p.bias[static_cast<std::size_t>(k)]));
            for (int c = 0; c < k_in; ++c) {
                const float* in_plane = input.plane(in, c);
                for (int u = 0; u < f; ++u) {
                    const int i0 = std::max(0, pad - u), i1 = std::min(h, h + pad - u);
                    for (int v = 0; v < f; ++v) {
                        const float wt = p.weights.at(k, c, u, v);
                        if (wt == 0.0f) continue;
                        const double wtd = wt;
                        const int j0 = std::max(0, pad - v), j1 = std::min(w, w + pad - v);
                        for (int i = i0; i < i1; ++i) {
                            double* orow = acc.data() + static_cast<std::int64_t>(i) * w;
                            const float* irow = in_plane + static_cast<std::int64_t>(i + u - pad) * w + (v - pad);
                            for (int j = j0; j < j1; ++j) orow[j] += wtd * irow[j];
                        }
                    }
                }
            }
            float* out_plane = out.plane(in, k);
            for (std::int64_t i = 0; i < out.plane_size(); ++i) out_plane[i] = static_cast<float>(acc[static_cast<std::size_t>(i)]);
        }
    });
    return out;
}

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input, const ConvParams& p) {
    p.validate();
    if (input.c != p.in_channels()) {
        throw std::invalid_argument("conv2d_backward: cached input has " + std::to_string(input.c) +
                                    " channels, weights expect " + std::to_string(p.in_channels()));
    }
    if (grad_out.n != input.n || grad_out.c != p.out_channels() || grad_out.h != input.h ||
        grad_out.w != input.w) {
        throw std::invalid_argument("conv2d_backward: grad_out shape " + grad_out.shape_str() +
                                    " does not match forward output for input " + input.shape_str());
    }
    const int f = p.kernel(), pad = p.padding;
    const int h = input.h, w = input.w;
    const int k_out = p.out_channels(), k_in = p.in_channels();

    ConvGrads g;
    g.input = Tensor(input.n, input.c, h, w);
    g.weights = Tensor(k_out, k_in, f, f);
    g.bias.assign(static_cast<std::size_t>(k_out), 0.0f);

    // grad bias and grad weights: one task per output channel.
    parallel_for(k_out, [&](std::int64_t begin, std::int64_t end) {
        for (int k = static_cast<int>(begin); k < end; ++k) {
            double bsum = 0.0;
            for (int in = 0; in < grad_out.n; ++in) {
                const float* go_plane = grad_out.plane(in, k);
                for (std::int64_t ix = 0; ix < grad_out.plane_size(); ++ix) bsum += go_plane[ix];
                for (int c = 0; c < k_in; ++c) {
                    const float* in_plane = input.plane(in, c);
                    for (int u = 0; u < f; ++u) {
                        const int i0 = std::max(0, pad - u), i1 = std::min(h, h + pad - u);
                        for (int v = 0; v < f; ++v) {
                            const int j0 = std::max(0, pad - v), j1 = std::min(w, w + pad - v);
                            float acc = 0.0f;
                            for (int i = i0; i < i1; ++i) {
                                const float* grow = go_plane + static_cast<std::int64_t>(i) * w + j0;
                                const float* irow =
                                    in_plane + static_cast<std::int64_t>(i + u - pad) * w + (j0 + v - pad);
                                acc += dot_rows(grow, irow, j1 - j0);
                            }
                            g.weights.at(k, c, u, v) += acc;
                        }
                    }
                }
            }
            g.bias[static_cast<std::size_t>(k)] = static_cast<float>(bsum);
        }
    });

    // grad input: one task per (image, input channel); full correlation of
    // grad_out with the transposed kernel, expressed as shifted row updates.
    parallel_for(static_cast<std::int64_t>(input.n) * k_in, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t task = begin; task < end; ++task) {
            const int in = static_cast<int>(task / k_in);
            const int c = static_cast<int>(task % k_in);
            float* gi_plane = g.input.plane(in, c);
            for (int k = 0; k < k_out; ++k) {
                const float* go_plane = grad_out.plane(in, k);
                for (int u = 0; u < f; ++u) {
                    const int i0 = std::max(0, pad - u), i1 = std::min(h, h + pad - u);
                    for (int v = 0; v < f; ++v) {
                        const float wt = p.weights.at(k, c, u, v);
                        if (wt == 0.0f) continue;
                        const int j0 = std::max(0, pad - v), j1 = std::min(w, w + pad - v);
                        for (int i = i0; i < i1; ++i) {
                            const float* grow = go_plane + static_cast<std::int64_t>(i) * w;
                            float* girow = gi_plane + static_cast<std::int64_t>(i + u - pad) * w + (v - pad);
                            for (int j = j0; j < j1; ++j) girow[j] += wt * grow[j];
                        }
                    }
                }
            }
        }
    });

    return g;
}

}  // namespace win
