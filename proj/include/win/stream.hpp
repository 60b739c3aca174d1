#pragma once

#include <cstdint>
#include <vector>

#include "win/image.hpp"
#include "win/patches.hpp"
#include "win/tensor.hpp"

namespace win {

enum class SigmaRegime { single, blind };

std::string to_string(SigmaRegime r);

struct StreamConfig {
    SigmaRegime regime = SigmaRegime::single;
    float sigma = 30.0f;     // single regime
    float sigma_lo = 0.0f;   // blind regime bounds
    float sigma_hi = 70.0f;
    int patch = 64;
    int stride = 32;
    int batch = 32;
    bool augment = true;
    // false: noise (and blind sigma) resampled per draw — every pass sees a
    // new corruption. true: noise is a function of the patch index, so the
    // stream cycles a fixed set of (noisy, clean) pairs; the memorization
    // smoke tests rely on this.
    bool fixed_noise = false;
    std::uint64_t seed = 0;
};

// Deterministic supervised batch source. batch(i) is a pure function of
// (corpus, config, i): patch order is reshuffled every pass, the blind
// regime draws sigma per patch, and noise is sampled fresh per draw. Because
// batches are addressed by index, prefetching can never reorder them and a
// resumed run continues bit-exactly from its step counter.
class TrainingStream {
  public:
    TrainingStream(const std::vector<GrayImage>& corpus, const StreamConfig& cfg);

    struct Batch {
        Tensor noisy;  // (b, 1, s, s), unclipped
        Tensor clean;  // (b, 1, s, s)
        std::vector<float> sigmas;
    };

    Batch batch(std::int64_t index) const;

    std::int64_t patch_count() const { return clean_patches_.n; }
    std::int64_t batches_per_pass() const { return patch_count() / cfg_.batch; }
    const StreamConfig& config() const { return cfg_; }

  private:
    StreamConfig cfg_;
    Tensor clean_patches_;  // (N, 1, s, s)
};

}  // namespace win
