#include "win/noise.hpp"

#include <stdexcept>
#include <string>

#include "win/rng.hpp"

namespace win {

ImagePair add_awgn(const GrayImage& clean, float sigma, std::uint64_t seed) {
    if (sigma < 0.0f) {
        throw std::invalid_argument("add_awgn: sigma must be >= 0, got " + std::to_string(sigma));
    }
    ImagePair pair;
    pair.clean = clean;
    pair.noisy = clean;
    pair.sigma = sigma;
    pair.seed = seed;

    auto rng = make_rng(seed_mix(seed, 0x6177676eULL));
    std::vector<float> noise(static_cast<std::size_t>(clean.pixels()));
    fill_gaussian(rng, sigma / 255.0f, noise);
    for (std::size_t i = 0; i < noise.size(); ++i) pair.noisy.v[i] += noise[i];
    return pair;
}

}  // namespace win
