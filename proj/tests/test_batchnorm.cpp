#include <doctest.h>

#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "win/batchnorm.hpp"
#include "win/rng.hpp"

using namespace win;
using namespace testsupport;

namespace {

void channel_stats(const Tensor& t, int c, double& mean, double& var) {
    double sum = 0.0, sum_sq = 0.0;
    const std::int64_t count = static_cast<std::int64_t>(t.n) * t.plane_size();
    for (int n = 0; n < t.n; ++n) {
        const float* p = t.plane(n, c);
        for (std::int64_t i = 0; i < t.plane_size(); ++i) {
            sum += p[i];
            sum_sq += static_cast<double>(p[i]) * p[i];
        }
    }
    mean = sum / static_cast<double>(count);
    var = sum_sq / static_cast<double>(count) - mean * mean;
}

}  // namespace

TEST_CASE("train mode normalizes each channel to zero mean, unit variance") {
    std::mt19937_64 rng(21);
    Tensor in = random_tensor(rng, 4, 3, 6, 6, 2.0f);
    for (float& x : in.data) x += 1.5f;
    BnParams p = BnParams::make(3);

    const Tensor out = batchnorm_forward(in, p, Mode::train);
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0, var = 0.0;
        channel_stats(out, c, mean, var);
        CHECK(std::abs(mean) < 1e-4);
        CHECK(std::abs(var - 1.0) < 1e-3);
    }
}

TEST_CASE("per-channel statistics hold at batch scale") {
    // >= 64 samples per channel, per the normalization contract
    std::mt19937_64 rng(22);
    Tensor in = random_tensor(rng, 8, 2, 4, 4, 3.0f);
    BnParams p = BnParams::make(2);
    const Tensor out = batchnorm_forward(in, p, Mode::train);
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0, var = 0.0;
        channel_stats(out, c, mean, var);
        CHECK(std::abs(mean) < 1e-4);
        CHECK(std::abs(var - 1.0) < 1e-3);
    }
}

TEST_CASE("all-zero input stays all-zero (eps guards the variance)") {
    Tensor in(2, 3, 4, 4);
    BnParams p = BnParams::make(3);
    const Tensor out = batchnorm_forward(in, p, Mode::train);
    for (float x : out.data) CHECK(x == 0.0f);
}

TEST_CASE("infer mode evaluates the closed form against running stats") {
    const float mu = 0.75f;
    Tensor in(2, 2, 3, 3, mu);
    BnParams p = BnParams::make(2);
    p.running_mean = {mu, mu};
    p.running_var = {0.25f, 4.0f};
    p.beta = {0.3f, -0.2f};

    const Tensor out = batchnorm_forward(in, p, Mode::infer);
    for (int c = 0; c < 2; ++c) {
        for (int n = 0; n < 2; ++n) {
            const float* plane = out.plane(n, c);
            for (std::int64_t i = 0; i < out.plane_size(); ++i) {
                CHECK(plane[i] == doctest::Approx(p.beta[static_cast<std::size_t>(c)]).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("train mode updates running statistics with momentum") {
    std::mt19937_64 rng(5);
    Tensor in = random_tensor(rng, 4, 1, 8, 8, 1.0f);
    for (float& x : in.data) x += 2.0f;
    BnParams p = BnParams::make(1);

    double mean = 0.0, var = 0.0;
    channel_stats(in, 0, mean, var);
    batchnorm_forward(in, p, Mode::train);
    CHECK(p.running_mean[0] == doctest::Approx(0.9 * 0.0 + 0.1 * mean).epsilon(1e-4));
    CHECK(p.running_var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * var).epsilon(1e-4));
}

TEST_CASE("infer mode rejects uninitialized running stats and C mismatch") {
    Tensor in(1, 2, 3, 3, 0.5f);
    BnParams p = BnParams::make(2);
    p.running_mean.clear();
    p.running_var.clear();
    CHECK_THROWS_AS(batchnorm_forward(in, p, Mode::infer), std::invalid_argument);

    BnParams wrong = BnParams::make(3);
    CHECK_THROWS_AS(batchnorm_forward(in, wrong, Mode::train), std::invalid_argument);
}

TEST_CASE("batchnorm backward matches central finite differences") {
    for (int trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(seed_mix(777, static_cast<std::uint64_t>(trial)));
        Tensor in = random_tensor(rng, 2, 3, 4, 4);
        BnParams p = BnParams::make(3);
        std::normal_distribution<float> dist(0.5f, 0.3f);
        for (float& g : p.gamma) g = dist(rng);
        for (float& b : p.beta) b = dist(rng);
        const Tensor probe = random_tensor(rng, 2, 3, 4, 4);

        BnParams work = p;
        BnCache cache;
        batchnorm_forward(in, work, Mode::train, &cache);
        const BnGrads analytic = batchnorm_backward(probe, cache, p);

        auto loss_of = [&] { return probe_loss(probe, bn_train_ref(in, p.gamma, p.beta, p.eps)); };
        for (std::size_t i = 0; i < in.data.size(); i += 3) {
            const double num = central_diff(loss_of, in.data[i]);
            CHECK(grad_close(analytic.input.data[i], num));
        }
        for (std::size_t c = 0; c < p.gamma.size(); ++c) {
            const double num = central_diff(loss_of, p.gamma[c]);
            CHECK(grad_close(analytic.gamma[c], num));
            const double numb = central_diff(loss_of, p.beta[c]);
            CHECK(grad_close(analytic.beta[c], numb));
        }
    }
}

TEST_CASE("grad_beta is the channel-wise sum of grad_out") {
    std::mt19937_64 rng(31);
    Tensor in = random_tensor(rng, 2, 4, 5, 5);
    BnParams p = BnParams::make(4);
    BnCache cache;
    batchnorm_forward(in, p, Mode::train, &cache);
    Tensor go = random_tensor(rng, 2, 4, 5, 5);

    const BnGrads g = batchnorm_backward(go, cache, p);
    for (int c = 0; c < 4; ++c) {
        double sum = 0.0;
        for (int n = 0; n < 2; ++n) {
            const float* plane = go.plane(n, c);
            for (std::int64_t i = 0; i < go.plane_size(); ++i) sum += plane[i];
        }
        CHECK(g.beta[static_cast<std::size_t>(c)] == doctest::Approx(sum).epsilon(1e-5));
    }
}

TEST_CASE("constant grad_out with identity gamma yields ~zero grad_input") {
    std::mt19937_64 rng(41);
    Tensor in = random_tensor(rng, 2, 2, 6, 6);
    BnParams p = BnParams::make(2);
    BnCache cache;
    batchnorm_forward(in, p, Mode::train, &cache);

    Tensor go(2, 2, 6, 6, 0.37f);
    const BnGrads g = batchnorm_backward(go, cache, p);
    for (float x : g.input.data) CHECK(std::abs(x) < 1e-5f);
}

TEST_CASE("backward without a cache is rejected") {
    Tensor go(1, 2, 3, 3, 1.0f);
    BnParams p = BnParams::make(2);
    BnCache empty;
    CHECK_THROWS_AS(batchnorm_backward(go, empty, p), std::invalid_argument);
}
