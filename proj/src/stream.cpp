#include "win/stream.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "win/noise.hpp"
#include "win/rng.hpp"

namespace win {
namespace {

constexpr std::uint64_t kPermTag = 0x7065726dULL;   // per-pass shuffle
constexpr std::uint64_t kBatchTag = 0x62617463ULL;  // per-batch draws
constexpr std::uint64_t kPairTag = 0x70616972ULL;   // fixed per-patch corruption

}  // namespace

std::string to_string(SigmaRegime r) { return r == SigmaRegime::single ? "single" : "blind"; }

TrainingStream::TrainingStream(const std::vector<GrayImage>& corpus, const StreamConfig& cfg) : cfg_(cfg) {
    if (corpus.empty()) throw std::invalid_argument("training stream: corpus is empty");
    if (cfg.batch < 1) throw std::invalid_argument("training stream: batch must be >= 1");
    if (cfg.regime == SigmaRegime::single && cfg.sigma < 0.0f) {
        throw std::invalid_argument("training stream: sigma must be >= 0");
    }
    if (cfg.regime == SigmaRegime::blind && (cfg.sigma_lo < 0.0f || cfg.sigma_hi < cfg.sigma_lo)) {
        throw std::invalid_argument("training stream: blind sigma range is invalid");
    }

    std::int64_t total = 0;
    std::vector<PatchSet> sets;
    sets.reserve(corpus.size());
    for (const auto& img : corpus) {
        sets.push_back(extract_patches(img, cfg.patch, cfg.stride));
        total += sets.back().patches.n;
    }
    clean_patches_ = Tensor(static_cast<int>(total), 1, cfg.patch, cfg.patch);
    std::int64_t at = 0;
    for (const auto& set : sets) {
        std::copy(set.patches.data.begin(), set.patches.data.end(),
                  clean_patches_.data.begin() + at * clean_patches_.plane_size());
        at += set.patches.n;
    }
    if (cfg.batch > total) {
        throw std::invalid_argument("training stream: batch " + std::to_string(cfg.batch) +
                                    " exceeds patch count " + std::to_string(total));
    }
}

TrainingStream::Batch TrainingStream::batch(std::int64_t index) const {
    if (index < 0) throw std::invalid_argument("training stream: batch index must be >= 0");
    const std::int64_t bpp = batches_per_pass();
    const std::int64_t pass = index / bpp;
    const std::int64_t slot = index % bpp;

    // Per-pass shuffle of patch order; pure function of (seed, pass).
    std::vector<std::int32_t> perm(static_cast<std::size_t>(patch_count()));
    std::iota(perm.begin(), perm.end(), 0);
    auto perm_rng = make_rng(seed_mix(cfg_.seed, kPermTag, static_cast<std::uint64_t>(pass)));
    std::shuffle(perm.begin(), perm.end(), perm_rng);

    // All stochastic choices for this batch come from one index-derived
    // engine, in a fixed order per patch: augmentation, sigma, noise.
    auto rng = make_rng(seed_mix(cfg_.seed, kBatchTag, static_cast<std::uint64_t>(index)));

    const int s = cfg_.patch;
    Batch out;
    out.clean = Tensor(cfg_.batch, 1, s, s);
    out.noisy = Tensor(cfg_.batch, 1, s, s);
    out.sigmas.resize(static_cast<std::size_t>(cfg_.batch));

    Tensor one(1, 1, s, s);
    for (int k = 0; k < cfg_.batch; ++k) {
        const std::int32_t pi = perm[static_cast<std::size_t>(slot * cfg_.batch + k)];
        const float* src = clean_patches_.plane(pi, 0);
        std::copy(src, src + one.plane_size(), one.data.begin());

        int code = 0;
        if (cfg_.augment) {
            code = static_cast<int>(rng() % 8);
            if (code != 0) one = augment(one, code);
        }

        auto pair_rng = make_rng(seed_mix(cfg_.seed, kPairTag, static_cast<std::uint64_t>(pi)));
        std::mt19937_64& draw_rng = cfg_.fixed_noise ? pair_rng : rng;

        float sigma = cfg_.sigma;
        if (cfg_.regime == SigmaRegime::blind) {
            std::uniform_real_distribution<float> dist(cfg_.sigma_lo, cfg_.sigma_hi);
            sigma = dist(draw_rng);
        }
        out.sigmas[static_cast<std::size_t>(k)] = sigma;

        float* clean_dst = out.clean.plane(k, 0);
        std::copy(one.data.begin(), one.data.end(), clean_dst);

        float* noisy_dst = out.noisy.plane(k, 0);
        std::copy(one.data.begin(), one.data.end(), noisy_dst);
        std::vector<float> noise(static_cast<std::size_t>(one.plane_size()));
        fill_gaussian(draw_rng, sigma / 255.0f, noise);
        for (std::size_t i = 0; i < noise.size(); ++i) noisy_dst[i] += noise[i];
    }
    return out;
}

}  // namespace win
