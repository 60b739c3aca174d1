#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "win/batchnorm.hpp"
#include "win/conv.hpp"

namespace win {

// The three wide-inference variants: a plain convolution stack, the same
// stack with an input-to-output skip, and the skip stack with batch
// normalization in every layer.
enum class Variant { win5, win5_r, win5_rb };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ModelConfig {
    Variant variant = Variant::win5_rb;
    int layers = 5;  // L
    int width = 128; // K, filters per hidden layer
    int kernel = 7;  // F, odd
    int input_channels = 1;

    bool has_bn() const { return variant == Variant::win5_rb; }
    bool has_skip() const { return variant != Variant::win5; }

    void validate() const;  // throws std::invalid_argument
};

// 1 + L*(F-1) for a chain of L same-padded FxF convolutions.
int receptive_field(const ModelConfig& cfg);

// Conv weights and biases, plus gamma/beta when BN is present. Running
// statistics are state, not learnable parameters, and are not counted.
std::int64_t learnable_param_count(const ModelConfig& cfg);

struct Model {
    ModelConfig config;
    struct Layer {
        ConvParams conv;
        BnParams bn;  // empty unless config.has_bn()
    };
    std::vector<Layer> layers;
};

// Weights ~ N(0, 2/(F*F*C_in)), biases 0, BN affine identity, running stats
// (0, 1). Bitwise deterministic for a given seed within one build.
Model build_model(const ModelConfig& cfg, std::uint64_t seed);

struct LayerCache {
    Tensor conv_in;
    BnCache bn;
    Tensor relu_in;
};

struct ForwardCache {
    Tensor input;
    std::vector<LayerCache> layers;
};

// Layers 1..L-1 are Conv[+BN]+ReLU, layer L is Conv[+BN] with no ReLU; skip
// variants return input + body. Train mode updates BN running statistics and
// fills cache for backward; pass cache only with Mode::train.
Tensor forward(Model& m, const Tensor& y, Mode mode, ForwardCache* cache = nullptr);

// Infer-mode forward on an immutable model; safe to call concurrently.
Tensor infer_forward(const Model& m, const Tensor& y);

struct LayerGrads {
    Tensor weights;
    std::vector<float> bias;
    std::vector<float> gamma;  // empty when the layer has no BN
    std::vector<float> beta;
};

struct ModelGrads {
    std::vector<LayerGrads> layers;
};

// grad_out is d loss / d final output (the skip, when present, feeds it to
// the body unchanged).
ModelGrads backward(const Model& m, const ForwardCache& cache, const Tensor& grad_out);

// Learnable parameter arrays in the fixed traversal order used everywhere
// (checkpoints, optimizer state): per layer conv weights, conv bias, then
// gamma, beta when BN is present.
std::vector<std::span<float>> collect_params(Model& m);
std::vector<std::span<const float>> collect_params(const Model& m);
std::vector<std::span<const float>> collect_grads(const ModelGrads& g);

}  // namespace win
