#include "win/ops.hpp"

#include <algorithm>

namespace win {

Tensor relu_forward(const Tensor& input) {
    Tensor out = input;
    for (float& x : out.data) x = std::max(0.0f, x);
    return out;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& cached_input) {
    require_same_shape(grad_out, cached_input, "relu_backward");
    Tensor g(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        g.data[i] = cached_input.data[i] > 0.0f ? grad_out.data[i] : 0.0f;
    }
    return g;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

MseResult mse_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "mse_loss");
    MseResult r;
    r.grad = Tensor(pred.n, pred.c, pred.h, pred.w);
    const double inv_n = 1.0 / static_cast<double>(pred.numel());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = static_cast<double>(pred.data[i]) - target.data[i];
        acc += d * d;
        r.grad.data[i] = static_cast<float>(d * inv_n);
    }
    r.loss = 0.5 * acc * inv_n;
    return r;
}

}  // namespace win
