#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "win/image.hpp"

namespace win {

// Peak signal-to-noise ratio over the [0,1] range: 10*log10(1/MSE), both
// images clipped first. Identical images return the 100 dB cap so reports
// stay finite and sortable.
double psnr(const GrayImage& ref, const GrayImage& test);

// Mean local SSIM, 11x11 Gaussian window (std 1.5), C1 = 0.01^2,
// C2 = 0.03^2 on the [0,1] range, reflection padding at borders. Both
// images clipped first; requires min dim >= 11.
double ssim(const GrayImage& ref, const GrayImage& test);

struct Histogram {
    std::array<std::uint64_t, 256> bins{};
    std::uint64_t total = 0;
};

// Counts of round(clip(v) * 255) per byte value.
Histogram histogram(const GrayImage& img);

// 1 - intersection of the normalized histograms; 0 iff the normalized
// shapes are identical, 1 on disjoint supports.
double hist_distance(const Histogram& a, const Histogram& b);

struct MetricsRow {
    std::string method;
    float sigma = 0.0f;
    std::string image;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;

    struct Mean {
        std::string method;
        float sigma = 0.0f;
        double psnr_db = 0.0;
        double ssim = 0.0;
        std::size_t count = 0;
    };

    // Per (method, sigma) group in first-seen order.
    std::vector<Mean> means() const;

    // header `method,sigma,image,psnr_db,ssim`, per-image rows, then one
    // aggregate block with image field MEAN.
    void write_csv(std::ostream& os) const;
};

std::string format_sigma(float sigma);

}  // namespace win
