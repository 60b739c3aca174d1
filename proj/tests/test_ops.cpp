#include <doctest.h>

#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "win/ops.hpp"
#include "win/rng.hpp"

using namespace win;
using namespace testsupport;

TEST_CASE("relu forward clamps negatives") {
    Tensor in(1, 1, 1, 3);
    in.data = {-1.0f, 0.0f, 2.0f};
    const Tensor out = relu_forward(in);
    CHECK(out.data[0] == 0.0f);
    CHECK(out.data[1] == 0.0f);
    CHECK(out.data[2] == 2.0f);
}

TEST_CASE("relu backward uses the zero subgradient at 0") {
    Tensor in(1, 1, 1, 3);
    in.data = {-1.0f, 0.0f, 2.0f};
    Tensor go(1, 1, 1, 3, 5.0f);
    const Tensor g = relu_backward(go, in);
    CHECK(g.data[0] == 0.0f);
    CHECK(g.data[1] == 0.0f);
    CHECK(g.data[2] == 5.0f);
}

TEST_CASE("relu gradient matches finite differences away from zero") {
    for (int trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(seed_mix(55, static_cast<std::uint64_t>(trial)));
        Tensor in = random_tensor(rng, 1, 2, 4, 4);
        for (float& x : in.data) {
            if (std::abs(x) < 0.05f) x += x >= 0.0f ? 0.1f : -0.1f;  // keep clear of the kink
        }
        const Tensor probe = random_tensor(rng, 1, 2, 4, 4);
        const Tensor analytic = relu_backward(probe, in);
        auto loss_of = [&] { return probe_loss(probe, relu_forward(in)); };
        for (std::size_t i = 0; i < in.data.size(); i += 2) {
            const double num = central_diff(loss_of, in.data[i]);
            CHECK(grad_close(analytic.data[i], num));
        }
    }
}

TEST_CASE("add is the elementwise sum and routes gradients unchanged") {
    std::mt19937_64 rng(8);
    Tensor a = random_tensor(rng, 1, 1, 3, 3);
    Tensor zeros(1, 1, 3, 3);
    const Tensor same = add(a, zeros);
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(same.data[i] == a.data[i]);

    // y + R(y) with R(y) = -(y - x) recovers x exactly
    Tensor x = random_tensor(rng, 1, 1, 3, 3);
    Tensor y = random_tensor(rng, 1, 1, 3, 3);
    Tensor residual(1, 1, 3, 3);
    for (std::size_t i = 0; i < residual.data.size(); ++i) residual.data[i] = x.data[i] - y.data[i];
    const Tensor recovered = add(y, residual);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        CHECK(recovered.data[i] == doctest::Approx(x.data[i]).epsilon(1e-6));
    }

    const Tensor go = random_tensor(rng, 1, 1, 3, 3);
    const auto [ga, gb] = add_backward(go);
    for (std::size_t i = 0; i < go.data.size(); ++i) {
        CHECK(ga.data[i] == go.data[i]);
        CHECK(gb.data[i] == go.data[i]);
    }

    Tensor wrong(1, 1, 2, 3);
    CHECK_THROWS_AS(add(a, wrong), std::invalid_argument);
}

TEST_CASE("mse loss: zero at equality, closed form at unit offset") {
    std::mt19937_64 rng(9);
    Tensor t = random_tensor(rng, 1, 1, 4, 4);
    const MseResult zero = mse_loss(t, t);
    CHECK(zero.loss == 0.0);
    for (float g : zero.grad.data) CHECK(g == 0.0f);

    Tensor shifted = t;
    for (float& x : shifted.data) x += 1.0f;
    const MseResult half = mse_loss(shifted, t);
    CHECK(half.loss == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("mse gradient matches finite differences") {
    std::mt19937_64 rng(10);
    Tensor pred = random_tensor(rng, 1, 1, 3, 3);
    const Tensor target = random_tensor(rng, 1, 1, 3, 3);
    const MseResult r = mse_loss(pred, target);
    auto loss_of = [&] { return mse_loss(pred, target).loss; };
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double num = central_diff(loss_of, pred.data[i]);
        CHECK(grad_close(r.grad.data[i], num, 1e-4, 1e-7));
    }
}
