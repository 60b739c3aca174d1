#include "win/model.hpp"

#include <cmath>
#include <stdexcept>

#include "win/ops.hpp"
#include "win/rng.hpp"

namespace win {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::win5: return "WIN5";
        case Variant::win5_r: return "WIN5_R";
        case Variant::win5_rb: return "WIN5_RB";
    }
    return "WIN5_RB";
}

Variant variant_from_string(const std::string& s) {
    if (s == "WIN5") return Variant::win5;
    if (s == "WIN5_R" || s == "WIN5-R") return Variant::win5_r;
    if (s == "WIN5_RB" || s == "WIN5-RB") return Variant::win5_rb;
    throw std::invalid_argument("unknown model variant '" + s + "' (expected WIN5, WIN5_R or WIN5_RB)");
}

void ModelConfig::validate() const {
    if (layers < 2) throw std::invalid_argument("model needs at least 2 layers, got " + std::to_string(layers));
    if (width < 1) throw std::invalid_argument("model width must be >= 1, got " + std::to_string(width));
    if (kernel < 1 || kernel % 2 == 0) {
        throw std::invalid_argument("kernel size must be odd and >= 1, got " + std::to_string(kernel));
    }
    if (input_channels != 1) {
        throw std::invalid_argument("only single-channel input is supported, got " +
                                    std::to_string(input_channels) + " channels");
    }
}

int receptive_field(const ModelConfig& cfg) { return 1 + cfg.layers * (cfg.kernel - 1); }

std::int64_t learnable_param_count(const ModelConfig& cfg) {
    const std::int64_t f2 = static_cast<std::int64_t>(cfg.kernel) * cfg.kernel;
    std::int64_t count = 0;
    for (int l = 0; l < cfg.layers; ++l) {
        const int c_in = l == 0 ? cfg.input_channels : cfg.width;
        const int c_out = l == cfg.layers - 1 ? cfg.input_channels : cfg.width;
        count += f2 * c_in * c_out + c_out;
        if (cfg.has_bn()) count += 2 * c_out;
    }
    return count;
}

Model build_model(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Model m;
    m.config = cfg;
    auto rng = make_rng(seed_mix(seed, 0x6d6f64656cULL));
    for (int l = 0; l < cfg.layers; ++l) {
        const int c_in = l == 0 ? cfg.input_channels : cfg.width;
        const int c_out = l == cfg.layers - 1 ? cfg.input_channels : cfg.width;
        Model::Layer layer;
        layer.conv = ConvParams::make(c_out, c_in, cfg.kernel);
        const float stddev = std::sqrt(2.0f / (static_cast<float>(cfg.kernel) * cfg.kernel * c_in));
        fill_gaussian(rng, stddev, layer.conv.weights.data);
        if (cfg.has_bn()) layer.bn = BnParams::make(c_out);
        m.layers.push_back(std::move(layer));
    }
    return m;
}

Tensor forward(Model& m, const Tensor& y, Mode mode, ForwardCache* cache) {
    if (y.c != m.config.input_channels) {
        throw std::invalid_argument("forward: input has " + std::to_string(y.c) + " channels, model expects " +
                                    std::to_string(m.config.input_channels));
    }
    const int last = static_cast<int>(m.layers.size()) - 1;
    if (cache) {
        cache->input = y;
        cache->layers.assign(m.layers.size(), {});
    }
    Tensor t = y;
    for (int l = 0; l <= last; ++l) {
        auto& layer = m.layers[static_cast<std::size_t>(l)];
        if (cache) cache->layers[static_cast<std::size_t>(l)].conv_in = t;
        t = conv2d_forward(t, layer.conv);
        if (m.config.has_bn()) {
            BnCache* bn_cache = cache ? &cache->layers[static_cast<std::size_t>(l)].bn : nullptr;
            t = batchnorm_forward(t, layer.bn, mode, bn_cache);
        }
        if (l != last) {
            if (cache) cache->layers[static_cast<std::size_t>(l)].relu_in = t;
            t = relu_forward(t);
        }
    }
    return m.config.has_skip() ? add(y, t) : t;
}

Tensor infer_forward(const Model& m, const Tensor& y) {
    if (y.c != m.config.input_channels) {
        throw std::invalid_argument("infer_forward: input has " + std::to_string(y.c) +
                                    " channels, model expects " + std::to_string(m.config.input_channels));
    }
    const int last = static_cast<int>(m.layers.size()) - 1;
    Tensor t = y;
    for (int l = 0; l <= last; ++l) {
        const auto& layer = m.layers[static_cast<std::size_t>(l)];
        t = conv2d_forward(t, layer.conv);
        if (m.config.has_bn()) t = batchnorm_infer(t, layer.bn);
        if (l != last) t = relu_forward(t);
    }
    return m.config.has_skip() ? add(y, t) : t;
}

ModelGrads backward(const Model& m, const ForwardCache& cache, const Tensor& grad_out) {
    if (cache.layers.size() != m.layers.size()) {
        throw std::invalid_argument("backward: cache does not match model (missing train-mode forward?)");
    }
    ModelGrads grads;
    grads.layers.resize(m.layers.size());
    const int last = static_cast<int>(m.layers.size()) - 1;

    // The skip connection passes the output gradient to the body unchanged.
    Tensor g = grad_out;
    for (int l = last; l >= 0; --l) {
        const auto& layer = m.layers[static_cast<std::size_t>(l)];
        const auto& lc = cache.layers[static_cast<std::size_t>(l)];
        auto& lg = grads.layers[static_cast<std::size_t>(l)];
        if (l != last) g = relu_backward(g, lc.relu_in);
        if (m.config.has_bn()) {
            BnGrads bg = batchnorm_backward(g, lc.bn, layer.bn);
            lg.gamma = std::move(bg.gamma);
            lg.beta = std::move(bg.beta);
            g = std::move(bg.input);
        }
        ConvGrads cg = conv2d_backward(g, lc.conv_in, layer.conv);
        lg.weights = std::move(cg.weights);
        lg.bias = std::move(cg.bias);
        g = std::move(cg.input);
    }
    return grads;
}

std::vector<std::span<float>> collect_params(Model& m) {
    std::vector<std::span<float>> out;
    for (auto& layer : m.layers) {
        out.emplace_back(layer.conv.weights.data);
        out.emplace_back(layer.conv.bias);
        if (m.config.has_bn()) {
            out.emplace_back(layer.bn.gamma);
            out.emplace_back(layer.bn.beta);
        }
    }
    return out;
}

std::vector<std::span<const float>> collect_params(const Model& m) {
    std::vector<std::span<const float>> out;
    for (const auto& layer : m.layers) {
        out.emplace_back(layer.conv.weights.data);
        out.emplace_back(layer.conv.bias);
        if (m.config.has_bn()) {
            out.emplace_back(layer.bn.gamma);
            out.emplace_back(layer.bn.beta);
        }
    }
    return out;
}

std::vector<std::span<const float>> collect_grads(const ModelGrads& g) {
    std::vector<std::span<const float>> out;
    for (const auto& layer : g.layers) {
        out.emplace_back(layer.weights.data);
        out.emplace_back(layer.bias);
        if (!layer.gamma.empty() || !layer.beta.empty()) {
            out.emplace_back(layer.gamma);
            out.emplace_back(layer.beta);
        }
    }
    return out;
}

}  // namespace win
