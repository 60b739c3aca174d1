#pragma once

#include <utility>

#include "win/tensor.hpp"

namespace win {

Tensor relu_forward(const Tensor& input);

// Gradient at exactly 0 is 0.
Tensor relu_backward(const Tensor& grad_out, const Tensor& cached_input);

Tensor add(const Tensor& a, const Tensor& b);

// Addition routes the incoming gradient to both operands unchanged.
inline std::pair<Tensor, Tensor> add_backward(const Tensor& grad_out) { return {grad_out, grad_out}; }

struct MseResult {
    double loss = 0.0;  // (1 / (2 * numel)) * sum((pred - target)^2)
    Tensor grad;        // d loss / d pred = (pred - target) / numel
};

MseResult mse_loss(const Tensor& pred, const Tensor& target);

}  // namespace win
