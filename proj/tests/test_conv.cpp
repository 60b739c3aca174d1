#include <doctest.h>

#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "win/conv.hpp"
#include "win/rng.hpp"

using namespace win;
using namespace testsupport;

TEST_CASE("identity kernel reproduces the input") {
    Tensor in(1, 1, 5, 5);
    std::mt19937_64 rng(7);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    for (float& x : in.data) x = dist(rng);

    ConvParams p = ConvParams::make(1, 1, 7);
    p.weights.at(0, 0, 3, 3) = 1.0f;  // centered delta

    const Tensor out = conv2d_forward(in, p);
    REQUIRE(out.same_shape(in));
    for (std::size_t i = 0; i < in.data.size(); ++i) CHECK(out.data[i] == in.data[i]);
}

TEST_CASE("all-ones input and kernel count the in-bounds taps") {
    Tensor in(1, 1, 4, 4, 1.0f);
    ConvParams p = ConvParams::make(1, 1, 7);
    for (float& w : p.weights.data) w = 1.0f;

    const Tensor out = conv2d_forward(in, p);
    const Tensor expect = naive_conv2d(in, p);
    for (std::size_t i = 0; i < out.data.size(); ++i) CHECK(out.data[i] == doctest::Approx(expect.data[i]));
    // corner output sees the full 4x4 image inside its 7x7 window
    CHECK(out.at(0, 0, 0, 0) == 16.0f);
    CHECK(out.at(0, 0, 3, 3) == 16.0f);
}

TEST_CASE("same padding preserves shape at full width") {
    Tensor in(2, 128, 8, 8, 0.25f);
    ConvParams p = ConvParams::make(128, 128, 7);
    const Tensor out = conv2d_forward(in, p);
    CHECK(out.n == 2);
    CHECK(out.c == 128);
    CHECK(out.h == 8);
    CHECK(out.w == 8);
}

TEST_CASE("optimized conv matches the quadruple-loop oracle") {
    std::mt19937_64 rng(make_rng(42)());
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> dim(1, 2), chan(1, 8), size(4, 16), fodd(0, 2);
        const int n = dim(rng), c_in = chan(rng), c_out = chan(rng);
        const int h = size(rng), w = size(rng);
        const int f = 2 * fodd(rng) + 3;  // 3, 5 or 7

        Tensor in = random_tensor(rng, n, c_in, h, w);
        ConvParams p = ConvParams::make(c_out, c_in, f);
        std::normal_distribution<float> dist(0.0f, 0.5f);
        for (float& x : p.weights.data) x = dist(rng);
        for (float& b : p.bias) b = dist(rng);

        const Tensor fast = conv2d_forward(in, p);
        const Tensor slow = naive_conv2d(in, p);
        double max_abs = 0.0;
        for (std::size_t i = 0; i < fast.data.size(); ++i) {
            max_abs = std::max(max_abs, std::abs(static_cast<double>(fast.data[i]) - slow.data[i]));
        }
        CHECK(max_abs < 1e-5);
    }
}

TEST_CASE("conv backward: zero grad_out gives zero gradients") {
    std::mt19937_64 rng(3);
    Tensor in = random_tensor(rng, 1, 2, 5, 5);
    ConvParams p = ConvParams::make(3, 2, 3);
    std::normal_distribution<float> dist(0.0f, 0.5f);
    for (float& x : p.weights.data) x = dist(rng);

    const Tensor go(1, 3, 5, 5);
    const ConvGrads g = conv2d_backward(go, in, p);
    for (float x : g.input.data) CHECK(x == 0.0f);
    for (float x : g.weights.data) CHECK(x == 0.0f);
    for (float x : g.bias) CHECK(x == 0.0f);
}

TEST_CASE("conv backward matches central finite differences") {
    for (int trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(seed_mix(900, static_cast<std::uint64_t>(trial)));
        Tensor in = random_tensor(rng, 1, 2, 6, 6);
        ConvParams p = ConvParams::make(2, 2, 3);
        std::normal_distribution<float> dist(0.0f, 0.5f);
        for (float& x : p.weights.data) x = dist(rng);
        for (float& b : p.bias) b = dist(rng);
        const Tensor probe = random_tensor(rng, 1, 2, 6, 6);

        const ConvGrads analytic = conv2d_backward(probe, in, p);

        auto loss_of = [&] { return probe_loss(probe, conv_forward_ref(in, p)); };
        for (std::size_t i = 0; i < in.data.size(); i += 5) {
            const double num = central_diff(loss_of, in.data[i]);
            CHECK(grad_close(analytic.input.data[i], num));
        }
        for (std::size_t i = 0; i < p.weights.data.size(); i += 3) {
            const double num = central_diff(loss_of, p.weights.data[i]);
            CHECK(grad_close(analytic.weights.data[i], num));
        }
        for (std::size_t i = 0; i < p.bias.size(); ++i) {
            const double num = central_diff(loss_of, p.bias[i]);
            CHECK(grad_close(analytic.bias[i], num));
        }
    }
}

TEST_CASE("grad_bias is the channel-wise sum of grad_out") {
    std::mt19937_64 rng(11);
    Tensor in = random_tensor(rng, 2, 3, 5, 5);
    ConvParams p = ConvParams::make(4, 3, 5);
    std::normal_distribution<float> dist(0.0f, 0.5f);
    for (float& x : p.weights.data) x = dist(rng);
    Tensor go = random_tensor(rng, 2, 4, 5, 5);

    const ConvGrads g = conv2d_backward(go, in, p);
    for (int k = 0; k < 4; ++k) {
        double sum = 0.0;
        for (int n = 0; n < 2; ++n) {
            const float* plane = go.plane(n, k);
            for (std::int64_t i = 0; i < go.plane_size(); ++i) sum += plane[i];
        }
        CHECK(g.bias[static_cast<std::size_t>(k)] == doctest::Approx(sum).epsilon(1e-5));
    }
}

TEST_CASE("conv rejects mismatched shapes with a descriptive error") {
    Tensor in(1, 3, 5, 5);
    ConvParams p = ConvParams::make(2, 2, 3);
    CHECK_THROWS_AS(conv2d_forward(in, p), std::invalid_argument);

    Tensor ok_in(1, 2, 5, 5);
    Tensor bad_go(1, 2, 4, 5);
    CHECK_THROWS_AS(conv2d_backward(bad_go, ok_in, p), std::invalid_argument);

    ConvParams bad_pad = ConvParams::make(2, 2, 3);
    bad_pad.padding = 0;
    CHECK_THROWS_AS(conv2d_forward(ok_in, bad_pad), std::invalid_argument);
}
