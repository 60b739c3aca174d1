#include "win/batchnorm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace win {
namespace {

void require_channels(const Tensor& input, int c, const char* op) {
    if (input.c != c) {
        throw std::invalid_argument(std::string(op) + ": input has " + std::to_string(input.c) +
                                    " channels, params have " + std::to_string(c));
    }
}

}  // namespace

BnParams BnParams::make(int channels) {
    BnParams p;
    p.gamma.assign(static_cast<std::size_t>(channels), 1.0f);
    p.beta.assign(static_cast<std::size_t>(channels), 0.0f);
    p.running_mean.assign(static_cast<std::size_t>(channels), 0.0f);
    p.running_var.assign(static_cast<std::size_t>(channels), 1.0f);
    return p;
}

Tensor batchnorm_infer(const Tensor& input, const BnParams& p) {
    require_channels(input, p.channels(), "batchnorm_infer");
    if (!p.stats_initialized()) {
        throw std::invalid_argument("batchnorm_infer: running statistics are uninitialized");
    }
    Tensor out(input.n, input.c, input.h, input.w);
    for (int c = 0; c < input.c; ++c) {
        const float inv = 1.0f / std::sqrt(p.running_var[static_cast<std::size_t>(c)] + p.eps);
        const float scale = p.gamma[static_cast<std::size_t>(c)] * inv;
        const float shift = p.beta[static_cast<std::size_t>(c)] -
                            scale * p.running_mean[static_cast<std::size_t>(c)];
        for (int in = 0; in < input.n; ++in) {
            const float* src = input.plane(in, c);
            float* dst = out.plane(in, c);
            for (std::int64_t i = 0; i < input.plane_size(); ++i) dst[i] = scale * src[i] + shift;
        }
    }
    return out;
}

Tensor batchnorm_forward(const Tensor& input, BnParams& p, Mode mode, BnCache* cache) {
    if (mode == Mode::infer) return batchnorm_infer(input, p);

    require_channels(input, p.channels(), "batchnorm_forward");
    const std::int64_t per_channel = static_cast<std::int64_t>(input.n) * input.plane_size();
    Tensor out(input.n, input.c, input.h, input.w);
    Tensor x_hat(input.n, input.c, input.h, input.w);
    std::vector<float> inv_std(static_cast<std::size_t>(input.c));

    for (int c = 0; c < input.c; ++c) {
        double sum = 0.0, sum_sq = 0.0;
        for (int in = 0; in < input.n; ++in) {
            const float* src = input.plane(in, c);
            for (std::int64_t i = 0; i < input.plane_size(); ++i) {
                sum += src[i];
                sum_sq += static_cast<double>(src[i]) * src[i];
            }
        }
        const double mean = sum / static_cast<double>(per_channel);
        double var = sum_sq / static_cast<double>(per_channel) - mean * mean;
        if (var < 0.0) var = 0.0;  // rounding guard for near-constant channels

        const float inv = static_cast<float>(1.0 / std::sqrt(var + p.eps));
        const float m = static_cast<float>(mean);
        inv_std[static_cast<std::size_t>(c)] = inv;
        const float gamma = p.gamma[static_cast<std::size_t>(c)];
        const float beta = p.beta[static_cast<std::size_t>(c)];
        for (int in = 0; in < input.n; ++in) {
            const float* src = input.plane(in, c);
            float* xh = x_hat.plane(in, c);
            float* dst = out.plane(in, c);
            for (std::int64_t i = 0; i < input.plane_size(); ++i) {
                const float normed = (src[i] - m) * inv;
                xh[i] = normed;
                dst[i] = gamma * normed + beta;
            }
        }

        p.running_mean[static_cast<std::size_t>(c)] =
            p.momentum * p.running_mean[static_cast<std::size_t>(c)] + (1.0f - p.momentum) * m;
        p.running_var[static_cast<std::size_t>(c)] =
            p.momentum * p.running_var[static_cast<std::size_t>(c)] + (1.0f - p.momentum) * static_cast<float>(var);
    }

    if (cache) {
        cache->x_hat = std::move(x_hat);
        cache->inv_std = std::move(inv_std);
    }
    return out;
}

BnGrads batchnorm_backward(const Tensor& grad_out, const BnCache& cache, const BnParams& p) {
    if (!cache.valid()) {
        throw std::invalid_argument("batchnorm_backward: missing train-mode forward cache");
    }
    require_same_shape(grad_out, cache.x_hat, "batchnorm_backward");
    require_channels(grad_out, p.channels(), "batchnorm_backward");

    const std::int64_t per_channel = static_cast<std::int64_t>(grad_out.n) * grad_out.plane_size();
    BnGrads g;
    g.input = Tensor(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
    g.gamma.assign(static_cast<std::size_t>(grad_out.c), 0.0f);
    g.beta.assign(static_cast<std::size_t>(grad_out.c), 0.0f);

    for (int c = 0; c < grad_out.c; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int in = 0; in < grad_out.n; ++in) {
            const float* dy = grad_out.plane(in, c);
            const float* xh = cache.x_hat.plane(in, c);
            for (std::int64_t i = 0; i < grad_out.plane_size(); ++i) {
                sum_dy += dy[i];
                sum_dy_xhat += static_cast<double>(dy[i]) * xh[i];
            }
        }
        g.beta[static_cast<std::size_t>(c)] = static_cast<float>(sum_dy);
        g.gamma[static_cast<std::size_t>(c)] = static_cast<float>(sum_dy_xhat);

        const float mean_dy = static_cast<float>(sum_dy / static_cast<double>(per_channel));
        const float mean_dy_xhat = static_cast<float>(sum_dy_xhat / static_cast<double>(per_channel));
        const float scale = p.gamma[static_cast<std::size_t>(c)] * cache.inv_std[static_cast<std::size_t>(c)];
        for (int in = 0; in < grad_out.n; ++in) {
            const float* dy = grad_out.plane(in, c);
            const float* xh = cache.x_hat.plane(in, c);
            float* dx = g.input.plane(in, c);
            for (std::int64_t i = 0; i < grad_out.plane_size(); ++i) {
                dx[i] = scale * (dy[i] - mean_dy - xh[i] * mean_dy_xhat);
            }
        }
    }
    return g;
}

}  // namespace win
