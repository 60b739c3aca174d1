#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "win/model.hpp"

namespace win {

struct AdamConfig {
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

struct OptState {
    std::vector<std::vector<float>> m;  // first moments, one array per parameter
    std::vector<std::vector<float>> v;  // second moments
    std::int64_t step = 0;

    static OptState like(const Model& m);
};

// Standard Adam update with bias correction. Throws DivergenceError before
// touching any state if a gradient is non-finite; throws
// std::invalid_argument on shape mismatch.
void adam_step(std::vector<std::span<float>> params, std::vector<std::span<const float>> grads,
               OptState& state, float lr, const AdamConfig& cfg = {});

}  // namespace win
