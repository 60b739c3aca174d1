#include "win/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace win {
namespace {

constexpr int kWindow = 11;
constexpr int kHalf = kWindow / 2;
constexpr double kGaussStd = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

// Symmetric reflection: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
int reflect(int i, int n) {
    if (i < 0) return -i - 1;
    if (i >= n) return 2 * n - 1 - i;
    return i;
}

std::array<double, kWindow> gaussian_window() {
    std::array<double, kWindow> g{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kHalf;
        g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kGaussStd * kGaussStd));
        sum += g[static_cast<std::size_t>(i)];
    }
    for (double& x : g) x /= sum;
    return g;
}

// Separable Gaussian filter with reflection padding, double precision.
std::vector<double> gauss_filter(const std::vector<double>& src, int h, int w) {
    static const std::array<double, kWindow> g = gaussian_window();
    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -kHalf; t <= kHalf; ++t) {
                acc += g[static_cast<std::size_t>(t + kHalf)] *
                       src[static_cast<std::size_t>(y) * w + reflect(x + t, w)];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -kHalf; t <= kHalf; ++t) {
                acc += g[static_cast<std::size_t>(t + kHalf)] *
                       tmp[static_cast<std::size_t>(reflect(y + t, h)) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

void require_same_dims(const GrayImage& a, const GrayImage& b, const char* op) {
    if (a.h != b.h || a.w != b.w) {
        throw std::invalid_argument(std::string(op) + ": image sizes differ (" + std::to_string(a.h) + "x" +
                                    std::to_string(a.w) + " vs " + std::to_string(b.h) + "x" +
                                    std::to_string(b.w) + ")");
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string format_sigma(float sigma) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", static_cast<double>(sigma));
    return buf;
}

double psnr(const GrayImage& ref, const GrayImage& test) {
    require_same_dims(ref, test, "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.v.size(); ++i) {
        const double a = std::clamp(ref.v[i], 0.0f, 1.0f);
        const double b = std::clamp(test.v[i], 0.0f, 1.0f);
        acc += (a - b) * (a - b);
    }
    const double mse = acc / static_cast<double>(ref.pixels());
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const GrayImage& ref, const GrayImage& test) {
    require_same_dims(ref, test, "ssim");
    if (ref.h < kWindow || ref.w < kWindow) {
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    }
    const int h = ref.h, w = ref.w;
    const std::size_t count = ref.v.size();
    std::vector<double> x(count), y(count), xx(count), yy(count), xy(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double a = std::clamp(ref.v[i], 0.0f, 1.0f);
        const double b = std::clamp(test.v[i], 0.0f, 1.0f);
        x[i] = a;
        y[i] = b;
        xx[i] = a * a;
        yy[i] = b * b;
        xy[i] = a * b;
    }
    const auto mu_x = gauss_filter(x, h, w);
    const auto mu_y = gauss_filter(y, h, w);
    const auto e_xx = gauss_filter(xx, h, w);
    const auto e_yy = gauss_filter(yy, h, w);
    const auto e_xy = gauss_filter(xy, h, w);

    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
        const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
        const double cov = e_xy[i] - mu_x[i] * mu_y[i];
        const double num = (2.0 * mu_x[i] * mu_y[i] + kC1) * (2.0 * cov + kC2);
        const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + kC1) * (var_x + var_y + kC2);
        acc += num / den;
    }
    return acc / static_cast<double>(count);
}

Histogram histogram(const GrayImage& img) {
    Histogram hist;
    for (float v : img.v) {
        const int bin = static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
        hist.bins[static_cast<std::size_t>(bin)] += 1;
    }
    hist.total = static_cast<std::uint64_t>(img.pixels());
    return hist;
}

double hist_distance(const Histogram& a, const Histogram& b) {
    if (a.total == 0 || b.total == 0) throw std::invalid_argument("hist_distance: empty histogram");
    double intersection = 0.0;
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
        const double pa = static_cast<double>(a.bins[i]) / static_cast<double>(a.total);
        const double pb = static_cast<double>(b.bins[i]) / static_cast<double>(b.total);
        intersection += std::min(pa, pb);
    }
    return std::clamp(1.0 - intersection, 0.0, 1.0);
}

std::vector<MetricsReport::Mean> MetricsReport::means() const {
    std::vector<Mean> out;
    for (const auto& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Mean& m) {
            return m.method == row.method && m.sigma == row.sigma;
        });
        if (it == out.end()) {
            out.push_back({row.method, row.sigma, 0.0, 0.0, 0});
            it = out.end() - 1;
        }
        it->psnr_db += row.psnr_db;
        it->ssim += row.ssim;
        it->count += 1;
    }
    for (auto& m : out) {
        m.psnr_db /= static_cast<double>(m.count);
        m.ssim /= static_cast<double>(m.count);
    }
    return out;
}

void MetricsReport::write_csv(std::ostream& os) const {
    os << "method,sigma,image,psnr_db,ssim\n";
    for (const auto& row : rows) {
        os << row.method << "," << format_sigma(row.sigma) << "," << row.image << "," << fmt(row.psnr_db)
           << "," << fmt(row.ssim) << "\n";
    }
    for (const auto& m : means()) {
        os << m.method << "," << format_sigma(m.sigma) << ",MEAN," << fmt(m.psnr_db) << "," << fmt(m.ssim)
           << "\n";
    }
}

}  // namespace win
