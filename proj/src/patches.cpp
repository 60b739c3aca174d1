#include "win/patches.hpp"

#include <stdexcept>
#include <string>

namespace win {

PatchSet extract_patches(const GrayImage& img, int size, int stride) {
    if (size < 1 || size > img.h || size > img.w) {
        throw std::invalid_argument("extract_patches: patch size " + std::to_string(size) +
                                    " does not fit a " + std::to_string(img.h) + "x" + std::to_string(img.w) +
                                    " image");
    }
    if (stride < 1) throw std::invalid_argument("extract_patches: stride must be >= 1");

    const int ny = (img.h - size) / stride + 1;
    const int nx = (img.w - size) / stride + 1;
    PatchSet set;
    set.patches = Tensor(ny * nx, 1, size, size);
    set.provenance.reserve(static_cast<std::size_t>(ny) * nx);

    int idx = 0;
    for (int py = 0; py < ny; ++py) {
        for (int px = 0; px < nx; ++px, ++idx) {
            const int top = py * stride, left = px * stride;
            float* dst = set.patches.plane(idx, 0);
            for (int y = 0; y < size; ++y) {
                const float* src = img.v.data() + static_cast<std::size_t>(top + y) * img.w + left;
                std::copy(src, src + size, dst + static_cast<std::size_t>(y) * size);
            }
            set.provenance.push_back({0, top, left, 0});
        }
    }
    return set;
}

Tensor augment(const Tensor& patch, int code) {
    if (code < 0 || code > 7) {
        throw std::invalid_argument("augment: code must be in 0..7, got " + std::to_string(code));
    }
    if (patch.h != patch.w) {
        throw std::invalid_argument("augment: patch must be square, got " + patch.shape_str());
    }
    if (code == 0) return patch;

    const int s = patch.h;
    const bool flip = (code & 4) != 0;
    const int rot = code & 3;
    Tensor out(patch.n, patch.c, s, s);
    for (int n = 0; n < patch.n; ++n) {
        for (int c = 0; c < patch.c; ++c) {
            const float* src = patch.plane(n, c);
            float* dst = out.plane(n, c);
            for (int y = 0; y < s; ++y) {
                for (int x = 0; x < s; ++x) {
                    int sy = y, sx = x;
                    // invert the clockwise rotation to find the source pixel
                    for (int r = 0; r < rot; ++r) {
                        const int ty = s - 1 - sx;
                        sx = sy;
                        sy = ty;
                    }
                    if (flip) sx = s - 1 - sx;
                    dst[static_cast<std::size_t>(y) * s + x] = src[static_cast<std::size_t>(sy) * s + sx];
                }
            }
        }
    }
    return out;
}

}  // namespace win
