#include "win/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "win/rng.hpp"

namespace win {
namespace {

// Two separable box-blur passes; cheap stand-in for a wide Gaussian.
void smooth(std::vector<float>& v, int h, int w, int radius, int passes) {
    std::vector<float> tmp(v.size());
    for (int pass = 0; pass < passes; ++pass) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                float acc = 0.0f;
                int cnt = 0;
                for (int t = -radius; t <= radius; ++t) {
                    const int xx = std::clamp(x + t, 0, w - 1);
                    acc += v[static_cast<std::size_t>(y) * w + xx];
                    ++cnt;
                }
                tmp[static_cast<std::size_t>(y) * w + x] = acc / static_cast<float>(cnt);
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                float acc = 0.0f;
                int cnt = 0;
                for (int t = -radius; t <= radius; ++t) {
                    const int yy = std::clamp(y + t, 0, h - 1);
                    acc += tmp[static_cast<std::size_t>(yy) * w + x];
                    ++cnt;
                }
                v[static_cast<std::size_t>(y) * w + x] = acc / static_cast<float>(cnt);
            }
        }
    }
}

}  // namespace

GrayImage synth_image(std::uint64_t seed, const SynthConfig& cfg) {
    auto rng = make_rng(seed_mix(seed, 0x73796e7468ULL));
    auto uni = [&](float a, float b) { return std::uniform_real_distribution<float>(a, b)(rng); };

    const int h = cfg.h, w = cfg.w;
    const float range = cfg.hi - cfg.lo;
    GrayImage img(h, w);

    // shaded background with a per-image mean so histograms differ by seed
    const float base = uni(cfg.lo + 0.2f * range, cfg.hi - 0.2f * range);
    const float gx = uni(-0.35f, 0.35f) * range;
    const float gy = uni(-0.35f, 0.35f) * range;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float fx = static_cast<float>(x) / static_cast<float>(w) - 0.5f;
            const float fy = static_cast<float>(y) / static_cast<float>(h) - 0.5f;
            img.at(y, x) = base + gx * fx + gy * fy;
        }
    }

    for (int s = 0; s < cfg.shapes; ++s) {
        const bool ellipse = rng() % 2 == 0;
        const float cx = uni(0.1f, 0.9f) * static_cast<float>(w);
        const float cy = uni(0.1f, 0.9f) * static_cast<float>(h);
        const float rx = uni(0.06f, 0.28f) * static_cast<float>(w);
        const float ry = uni(0.06f, 0.28f) * static_cast<float>(h);
        const float value = uni(cfg.lo, cfg.hi);
        const float alpha = uni(0.6f, 1.0f);
        const float soft = uni(0.04f, 0.15f);

        const int y0 = std::max(0, static_cast<int>(cy - ry * (1.0f + soft)) - 1);
        const int y1 = std::min(h, static_cast<int>(cy + ry * (1.0f + soft)) + 2);
        const int x0 = std::max(0, static_cast<int>(cx - rx * (1.0f + soft)) - 1);
        const int x1 = std::min(w, static_cast<int>(cx + rx * (1.0f + soft)) + 2);
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const float dx = (static_cast<float>(x) - cx) / rx;
                const float dy = (static_cast<float>(y) - cy) / ry;
                const float d = ellipse ? std::sqrt(dx * dx + dy * dy)
                                        : std::max(std::abs(dx), std::abs(dy));
                const float cov = std::clamp((1.0f - d) / soft, 0.0f, 1.0f);
                if (cov > 0.0f) {
                    float& px = img.at(y, x);
                    px += alpha * cov * (value - px);
                }
            }
        }
    }

    if (cfg.texture > 0.0f) {
        std::vector<float> tex(img.v.size());
        fill_gaussian(rng, cfg.texture, tex);
        smooth(tex, h, w, 1, 2);
        for (std::size_t i = 0; i < tex.size(); ++i) img.v[i] += tex[i];
    }

    for (float& x : img.v) x = std::clamp(x, cfg.lo, cfg.hi);
    return img;
}

}  // namespace win
