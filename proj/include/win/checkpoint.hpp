#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "win/adam.hpp"
#include "win/model.hpp"

namespace win {

struct TrainMeta {
    std::int64_t step = 0;
    std::int64_t epoch = 0;
    std::string sigma_regime;  // e.g. "single:30" or "blind:0-70"
    std::uint64_t seed = 0;
};

struct LoadedCheckpoint {
    Model model;
    std::optional<OptState> opt;
    TrainMeta meta;
};

// Binary format (.winckpt), all multi-byte values little-endian:
//   "WINCKPT" magic, one version byte (1),
//   u32 header length, UTF-8 JSON header (config + meta + optimizer flag),
//   raw float32 arrays per layer: weights, bias, then gamma, beta,
//   running_mean, running_var when BN is present,
//   then, if optimizer state is included, all Adam m arrays followed by all
//   v arrays in the learnable-parameter traversal order.
// save -> load -> save is byte-identical.
void save_checkpoint(const Model& m, const std::string& path, const OptState* opt = nullptr,
                     const TrainMeta* meta = nullptr);

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace win
