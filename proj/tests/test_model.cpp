#include <doctest.h>

#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "win/adam.hpp"
#include "win/model.hpp"
#include "win/ops.hpp"
#include "win/rng.hpp"

using namespace win;
using namespace testsupport;

TEST_CASE("learnable parameter counts for the default configs") {
    ModelConfig plain{Variant::win5};
    CHECK(learnable_param_count(plain) == 2421505);

    ModelConfig skip{Variant::win5_r};
    CHECK(learnable_param_count(skip) == 2421505);

    ModelConfig bn{Variant::win5_rb};
    CHECK(learnable_param_count(bn) == 2422531);
}

TEST_CASE("receptive field follows 1 + L*(F-1)") {
    ModelConfig cfg{Variant::win5};
    CHECK(receptive_field(cfg) == 31);

    cfg.layers = 1;
    CHECK(receptive_field(cfg) == 7);

    cfg.layers = 5;
    cfg.kernel = 3;
    CHECK(receptive_field(cfg) == 11);
}

TEST_CASE("same seed builds bitwise-identical parameters") {
    ModelConfig cfg{Variant::win5_rb, 3, 4, 3};
    const Model a = build_model(cfg, 1234);
    const Model b = build_model(cfg, 1234);
    const auto pa = collect_params(a);
    const auto pb = collect_params(b);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        REQUIRE(pa[i].size() == pb[i].size());
        for (std::size_t j = 0; j < pa[i].size(); ++j) CHECK(pa[i][j] == pb[i][j]);
    }

    const Model c = build_model(cfg, 1235);
    bool any_diff = false;
    const auto pc = collect_params(c);
    for (std::size_t j = 0; j < pa[0].size(); ++j) any_diff |= pa[0][j] != pc[0][j];
    CHECK(any_diff);
}

TEST_CASE("layer wiring matches the variant") {
    for (Variant v : {Variant::win5, Variant::win5_r, Variant::win5_rb}) {
        ModelConfig cfg{v, 5, 8, 7};
        const Model m = build_model(cfg, 1);
        REQUIRE(m.layers.size() == 5);
        CHECK(m.layers[0].conv.in_channels() == 1);
        CHECK(m.layers[0].conv.out_channels() == 8);
        for (int l = 1; l < 4; ++l) {
            CHECK(m.layers[static_cast<std::size_t>(l)].conv.in_channels() == 8);
            CHECK(m.layers[static_cast<std::size_t>(l)].conv.out_channels() == 8);
        }
        CHECK(m.layers[4].conv.in_channels() == 8);
        CHECK(m.layers[4].conv.out_channels() == 1);
        // BN state exists exactly for the RB variant, in every layer
        for (const auto& layer : m.layers) {
            CHECK(layer.bn.channels() == (v == Variant::win5_rb ? layer.conv.out_channels() : 0));
        }
    }
}

TEST_CASE("zero-body skip variants are the exact identity map") {
    for (Variant v : {Variant::win5_r, Variant::win5_rb}) {
        ModelConfig cfg{v, 5, 6, 7};
        Model m = build_model(cfg, 3);
        for (auto& layer : m.layers) {
            std::fill(layer.conv.weights.data.begin(), layer.conv.weights.data.end(), 0.0f);
            std::fill(layer.conv.bias.begin(), layer.conv.bias.end(), 0.0f);
        }
        std::mt19937_64 rng(17);
        const Tensor y = random_tensor(rng, 2, 1, 12, 12);

        Tensor out = forward(m, y, Mode::infer);
        REQUIRE(out.same_shape(y));
        for (std::size_t i = 0; i < y.data.size(); ++i) CHECK(out.data[i] == y.data[i]);

        // train mode too (batch statistics of an all-zero body are still zero)
        ForwardCache cache;
        out = forward(m, y, Mode::train, &cache);
        for (std::size_t i = 0; i < y.data.size(); ++i) CHECK(out.data[i] == y.data[i]);
    }
}

TEST_CASE("forward preserves the input shape") {
    ModelConfig cfg{Variant::win5, 5, 4, 7};
    Model m = build_model(cfg, 5);
    Tensor y(1, 1, 40, 40, 0.5f);
    const Tensor out = forward(m, y, Mode::infer);
    CHECK(out.n == 1);
    CHECK(out.c == 1);
    CHECK(out.h == 40);
    CHECK(out.w == 40);
}

TEST_CASE("a body emitting x - y makes the skip return x exactly") {
    std::mt19937_64 rng(23);
    const Tensor y = random_tensor(rng, 1, 1, 6, 6);
    const Tensor x = random_tensor(rng, 1, 1, 6, 6);
    Tensor residual(1, 1, 6, 6);
    for (std::size_t i = 0; i < residual.data.size(); ++i) residual.data[i] = x.data[i] - y.data[i];
    const Tensor merged = add(y, residual);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        CHECK(merged.data[i] == doctest::Approx(x.data[i]).epsilon(1e-6));
    }
}

TEST_CASE("infer-mode forward never mutates the model") {
    ModelConfig cfg{Variant::win5_rb, 3, 4, 3};
    Model m = build_model(cfg, 7);
    std::mt19937_64 rng(29);
    const Tensor y = random_tensor(rng, 2, 1, 8, 8);

    Model before = m;
    infer_forward(m, y);
    const auto pa = collect_params(before);
    const auto pb = collect_params(m);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t j = 0; j < pa[i].size(); ++j) CHECK(pa[i][j] == pb[i][j]);
    }
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        CHECK(m.layers[l].bn.running_mean == before.layers[l].bn.running_mean);
        CHECK(m.layers[l].bn.running_var == before.layers[l].bn.running_var);
    }
}

TEST_CASE("train-mode forward updates BN running stats; infer matches after convergence") {
    ModelConfig cfg{Variant::win5_rb, 2, 3, 3};
    Model m = build_model(cfg, 11);
    std::mt19937_64 rng(31);
    const Tensor y = random_tensor(rng, 4, 1, 8, 8);
    const auto rm_before = m.layers[0].bn.running_mean;
    forward(m, y, Mode::train);
    CHECK(m.layers[0].bn.running_mean != rm_before);
}

TEST_CASE("one training step touches every learnable parameter array") {
    for (Variant v : {Variant::win5, Variant::win5_r, Variant::win5_rb}) {
        ModelConfig cfg{v, 3, 4, 3};
        Model m = build_model(cfg, 13);
        std::mt19937_64 rng(37);
        const Tensor y = random_tensor(rng, 2, 1, 8, 8, 0.5f);
        const Tensor x = random_tensor(rng, 2, 1, 8, 8, 0.5f);

        const Model before = m;
        ForwardCache cache;
        const Tensor out = forward(m, y, Mode::train, &cache);
        const MseResult mse = mse_loss(out, x);
        REQUIRE(mse.loss > 0.0);
        const ModelGrads grads = backward(m, cache, mse.grad);
        OptState opt = OptState::like(m);
        adam_step(collect_params(m), collect_grads(grads), opt, 1e-3f);

        const auto pa = collect_params(before);
        const auto pb = collect_params(m);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            bool changed = false;
            for (std::size_t j = 0; j < pa[i].size(); ++j) changed |= pa[i][j] != pb[i][j];
            CHECK(changed);
        }
    }
}

TEST_CASE("model backward matches finite differences through the whole net") {
    // small WIN5_RB so the check covers conv+BN+ReLU+skip jointly
    ModelConfig cfg{Variant::win5_rb, 3, 2, 3};
    Model m = build_model(cfg, 41);
    std::mt19937_64 rng(43);
    const Tensor y = random_tensor(rng, 2, 1, 5, 5);
    const Tensor probe = random_tensor(rng, 2, 1, 5, 5);

    ForwardCache cache;
    Model work = m;
    forward(work, y, Mode::train, &cache);
    const ModelGrads grads = backward(work, cache, probe);

    auto loss_of = [&] {
        Model fresh = m;
        const int last = static_cast<int>(fresh.layers.size()) - 1;
        // double-precision reference of the full chain
        Tensor cur_t = y;
        for (int l = 0; l <= last; ++l) {
            auto& layer = fresh.layers[static_cast<std::size_t>(l)];
            std::vector<double> conv_out = conv_forward_ref(cur_t, layer.conv);
            Tensor tmp(cur_t.n, layer.conv.out_channels(), cur_t.h, cur_t.w);
            for (std::size_t i = 0; i < conv_out.size(); ++i) tmp.data[i] = static_cast<float>(conv_out[i]);
            std::vector<double> bn_out = bn_train_ref(tmp, layer.bn.gamma, layer.bn.beta, layer.bn.eps);
            for (std::size_t i = 0; i < bn_out.size(); ++i) tmp.data[i] = static_cast<float>(bn_out[i]);
            if (l != last) {
                for (float& xv : tmp.data) xv = std::max(0.0f, xv);
            }
            cur_t = tmp;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < cur_t.data.size(); ++i) {
            acc += static_cast<double>(probe.data[i]) * (static_cast<double>(y.data[i]) + cur_t.data[i]);
        }
        return acc;
    };

    // spot-check parameter gradients across layers
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        auto& wdata = m.layers[l].conv.weights.data;
        for (std::size_t i = 0; i < wdata.size(); i += 7) {
            const double num = central_diff(loss_of, wdata[i]);
            CHECK(grad_close(grads.layers[l].weights.data[i], num, 2e-3, 1e-4));
        }
        for (std::size_t c = 0; c < m.layers[l].bn.gamma.size(); ++c) {
            const double num = central_diff(loss_of, m.layers[l].bn.gamma[c]);
            CHECK(grad_close(grads.layers[l].gamma[c], num, 2e-3, 1e-4));
        }
    }
}

TEST_CASE("invalid configs are rejected") {
    ModelConfig cfg{Variant::win5, 1, 4, 7};
    CHECK_THROWS_AS(build_model(cfg, 0), std::invalid_argument);
    cfg = {Variant::win5, 5, 4, 4};
    CHECK_THROWS_AS(build_model(cfg, 0), std::invalid_argument);
    cfg = {Variant::win5, 5, 0, 7};
    CHECK_THROWS_AS(build_model(cfg, 0), std::invalid_argument);

    Model m = build_model(ModelConfig{Variant::win5, 2, 2, 3}, 1);
    Tensor rgb(1, 3, 8, 8, 0.1f);
    CHECK_THROWS_AS(forward(m, rgb, Mode::infer), std::invalid_argument);
}
