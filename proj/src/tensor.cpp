#include "win/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace win {

Tensor::Tensor(int n_, int c_, int h_, int w_, float fill) : n(n_), c(c_), h(h_), w(w_) {
    if (n < 1 || c < 1 || h < 1 || w < 1) {
        std::ostringstream os;
        os << "tensor dimensions must all be >= 1, got (" << n_ << "," << c_ << "," << h_ << "," << w_ << ")";
        throw std::invalid_argument(os.str());
    }
    data.assign(static_cast<std::size_t>(numel()), fill);
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "(" << n << "," << c << "," << h << "," << w << ")";
    return os.str();
}

bool Tensor::all_finite() const {
    for (float x : data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    }
}

}  // namespace win
