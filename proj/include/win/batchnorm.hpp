#pragma once

#include <vector>

#include "win/tensor.hpp"

namespace win {

enum class Mode { train, infer };

// Per-channel batch normalization state. The running mean/variance pair is
// the model's preserved data prior; it is carried in checkpoints alongside
// the learnable gamma/beta.
struct BnParams {
    std::vector<float> gamma;
    std::vector<float> beta;
    std::vector<float> running_mean;
    std::vector<float> running_var;
    float eps = 1e-5f;
    float momentum = 0.9f;

    int channels() const { return static_cast<int>(gamma.size()); }
    bool stats_initialized() const { return !running_mean.empty(); }

    // gamma 1, beta 0, running mean 0, running var 1.
    static BnParams make(int channels);
};

struct BnCache {
    Tensor x_hat;                // normalized input, saved for backward
    std::vector<float> inv_std;  // per channel, from batch statistics
    bool valid() const { return !x_hat.empty(); }
};

// Train mode normalizes by batch statistics over (n,h,w), applies
// gamma/beta, and updates p.running_* in place (caller-owned state):
//   running <- momentum * running + (1 - momentum) * batch.
// Infer mode normalizes by the stored running statistics and never mutates.
Tensor batchnorm_forward(const Tensor& input, BnParams& p, Mode mode, BnCache* cache = nullptr);

// Infer-mode path usable on a const model.
Tensor batchnorm_infer(const Tensor& input, const BnParams& p);

struct BnGrads {
    Tensor input;
    std::vector<float> gamma;
    std::vector<float> beta;
};

// Exact adjoint of the train-mode transformation, batch-statistics paths
// included. Requires the cache of a train-mode forward on the same input.
BnGrads batchnorm_backward(const Tensor& grad_out, const BnCache& cache, const BnParams& p);

}  // namespace win
