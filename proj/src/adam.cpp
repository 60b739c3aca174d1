#include "win/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "win/errors.hpp"

namespace win {

OptState OptState::like(const Model& model) {
    OptState st;
    for (auto span : collect_params(model)) {
        st.m.emplace_back(span.size(), 0.0f);
        st.v.emplace_back(span.size(), 0.0f);
    }
    return st;
}

void adam_step(std::vector<std::span<float>> params, std::vector<std::span<const float>> grads,
               OptState& state, float lr, const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient/state array counts differ");
    }
    for (std::size_t a = 0; a < params.size(); ++a) {
        if (params[a].size() != grads[a].size() || params[a].size() != state.m[a].size()) {
            throw std::invalid_argument("adam_step: array " + std::to_string(a) + " shape mismatch");
        }
        for (float gv : grads[a]) {
            if (!std::isfinite(gv)) {
                throw DivergenceError("adam_step: non-finite gradient in array " + std::to_string(a) +
                                      " at step " + std::to_string(state.step + 1));
            }
        }
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(static_cast<double>(cfg.beta1), static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(static_cast<double>(cfg.beta2), static_cast<double>(state.step));
    const float inv_bc1 = static_cast<float>(1.0 / bc1);
    const float inv_bc2 = static_cast<float>(1.0 / bc2);

    for (std::size_t a = 0; a < params.size(); ++a) {
        float* p = params[a].data();
        const float* g = grads[a].data();
        float* m = state.m[a].data();
        float* v = state.v[a].data();
        const std::size_t len = params[a].size();
        for (std::size_t i = 0; i < len; ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0f - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0f - cfg.beta2) * g[i] * g[i];
            const float m_hat = m[i] * inv_bc1;
            const float v_hat = v[i] * inv_bc2;
            p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

}  // namespace win
