#include <cmath>
#include <numbers>

#include "doctest.h"
#include "egdlab/toy_sim.hpp"

using namespace egdlab::toy;

namespace {

// Row-by-row GD, no sufficient statistics.
std::vector<std::array<double, 2>> naive_gd(const ToyDataset& d, std::array<double, 2> w, double eta, int steps) {
    std::vector<std::array<double, 2>> out{w};
    const auto n = static_cast<double>(d.x.rows());
    for (int k = 0; k < steps; ++k) {
        double g0 = 0, g1 = 0;
        for (std::size_t i = 0; i < d.x.rows(); ++i) {
            const double r = d.x(i, 0) * w[0] + d.x(i, 1) * w[1] - d.y[i];
            g0 += d.x(i, 0) * r;
            g1 += d.x(i, 1) * r;
        }
        w = {w[0] - eta * g0 / n, w[1] - eta * g1 / n};
        out.push_back(w);
    }
    return out;
}

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

TEST_CASE("train sampler") {
    ToyConfig c;
    const auto d = sample_train(c, 100000, 3);
    REQUIRE(d.x.rows() == 100000);
    double abs_mean = 0;
    bool margin_ok = true, labels_ok = true;
    for (std::size_t i = 0; i < d.x.rows(); ++i) {
        margin_ok &= std::abs(d.x(i, 0)) >= c.s;
        labels_ok &= d.y[i] == (d.x(i, 0) > 0 ? 1.0 : -1.0);
        abs_mean += std::abs(d.x(i, 0));
    }
    CHECK(margin_ok);
    CHECK(labels_ok);
    CHECK(std::abs(abs_mean / 1e5 - constants(c).m1) < 0.02);
    CHECK(d.acceptance_rate == doctest::Approx(2 * normal_sf(1.0)).epsilon(0.02));

    c.s = 0;
    const auto u = sample_train(c, 40000, 4);
    double m2 = 0;
    for (std::size_t i = 0; i < u.x.rows(); ++i) m2 += u.x(i, 0) * u.x(i, 0);
    CHECK(u.acceptance_rate == 1.0);
    CHECK(std::abs(m2 / 40000 - 1) < 3 * std::sqrt(2.0 / 40000));

    c.s = 6;
    CHECK_THROWS_AS(sample_train(c, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_train(ToyConfig{}, 0, 1), std::invalid_argument);
}

TEST_CASE("test sampler") {
    ToyConfig c;
    c.epsilon = 1;
    const std::size_t n = 100000;
    const auto d = sample_test(c, n, 5);
    const double v1 = std::cos(c.theta), v2 = std::sin(c.theta);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) ok &= (d.x(i, 0) * v1 + d.x(i, 1) * v2) * d.x(i, 0) <= 0;
    CHECK(ok);
    // accepted draws / total draws ~ 1/4; binomial sigma of the rate
    const double sigma = std::sqrt(0.25 * 0.75 / (n / 0.25));
    CHECK(std::abs(d.acceptance_rate - 0.25) < 3 * sigma + 1e-4);
    CHECK(empirical_error({1, 0}, d) == 0.0);
    CHECK(empirical_error({-1, 0}, d) == 1.0);
    CHECK(empirical_error({0, 0}, d) == 1.0);
    CHECK(empirical_error({1, 0}, sample_train(c, 1000, 6)) == 0.0);
}

TEST_CASE("empirical error converges to the orthant form") {
    ToyConfig c;
    const auto d = sample_test(c, 200000, 8);
    for (auto w : {std::array<double, 2>{1, -1}, {0.3, 5.0}, {1.0, 2.0}, {-std::sin(c.theta), std::cos(c.theta)}})
        CHECK(std::abs(empirical_error(w, d) - orthant_error_for(c, w[0], w[1])) < 0.01);
}

TEST_CASE("samplers are deterministic in the seed") {
    const ToyConfig c;
    const auto a = sample_test(c, 500, 42), b = sample_test(c, 500, 42), e = sample_test(c, 500, 43);
    CHECK(std::equal(a.x.data(), a.x.data() + 1000, b.x.data()));
    CHECK_FALSE(std::equal(a.x.data(), a.x.data() + 1000, e.x.data()));
}

TEST_CASE("vanilla GD against row-wise GD and the closed form") {
    ToyConfig c;
    c.u1 = 0.4;
    const auto d = sample_train(c, 300, 9);
    const auto run = run_vanilla_gd(d, c, 200);
    REQUIRE(run.iterates.size() == 201);
    CHECK(run.iterates[0].w[0] == 0.4);
    CHECK(run.iterates[0].w[1] == 10.0);
    const auto ref = naive_gd(d, {0.4, 10.0}, c.eta, 200);
    for (int k = 0; k <= 200; ++k) {
        CHECK(dist(run.iterates[k].w, ref[k]) < 1e-10);
        const auto cf = closed_form_vanilla(run.sigma_hat, run.w_ols, {0.4, 10.0}, c.eta, k);
        CHECK(dist(cf.w, run.iterates[k].w) < 1e-8);
    }
    const auto far = closed_form_vanilla(run.sigma_hat, run.w_ols, {0.4, 10.0}, c.eta, 10000000);
    CHECK(dist(far.w, run.w_ols) < 1e-8);
    // normal equations
    const auto& s = run.sigma_hat;
    CHECK(s.a * run.w_ols[0] + s.b * run.w_ols[1] == doctest::Approx(run.xty[0]));
    CHECK(s.b * run.w_ols[0] + s.c * run.w_ols[1] == doctest::Approx(run.xty[1]));
}

TEST_CASE("sigma hat concentrates on diag(m2, eps)") {
    const ToyConfig c;
    const auto run = run_vanilla_gd(sample_train(c, 100000, 10), c, 0);
    const auto k = constants(c);
    CHECK(std::abs(run.sigma_hat.a - k.m2) < 0.02);
    CHECK(std::abs(run.sigma_hat.b) < 0.02);
    CHECK(std::abs(run.sigma_hat.c - c.epsilon) < 0.02);
}

TEST_CASE("EGD toy recursion") {
    const double eta = 0.1;
    const auto bound = static_cast<std::size_t>(std::ceil(std::log(100.0) / eta));
    for (double eps : {0.1, 0.01, 0.001}) {
        ToyConfig c;
        c.epsilon = eps;
        const auto d = sample_train(c, 2000, 11);
        const auto run = run_egd_toy(d, c, 100);
        const std::array<double, 2> w0{c.u1, c.u2};
        CHECK(run.iterates[0].w == w0);
        for (std::int64_t k = 0; k <= 100; ++k) {
            const auto cf = closed_form_egd(run.w_ols, w0, eta, k);
            CHECK(dist(cf.w, run.iterates[k].w) < 1e-8);
        }
        std::size_t reached = 0;
        while (dist(run.iterates[reached].w, run.w_ols) > 0.01 * dist(w0, run.w_ols)) ++reached;
        CHECK(reached <= bound);
    }
}

TEST_CASE("EGD toy falls back to the pseudo-inverse") {
    ToyConfig c;
    ToyDataset d{egdlab::DenseMatrix(4, 2), {1, -1, 1, -1}, DatasetKind::train, 0, 1.0};
    for (std::size_t i = 0; i < 4; ++i) d.x(i, 0) = d.y[i] * (1.0 + static_cast<double>(i));
    const auto run = run_egd_toy(d, c, 50);
    for (const auto& it : run.iterates) CHECK(std::isfinite(it.w[0] + it.w[1]));
    CHECK(run.iterates.back().w[1] == doctest::Approx(10.0));
}

TEST_CASE("divergence names the step") {
    ToyConfig c;
    c.eta = 0.3;  // eta * lambda_max(Sigma_hat) > 2 for this data
    ToyDataset d{egdlab::DenseMatrix(2, 2), {1, -1}, DatasetKind::train, 0, 1.0};
    d.x(0, 0) = 5;
    d.x(1, 0) = -5;
    try {
        run_vanilla_gd(d, c, 10000);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.step > 0);
        CHECK(std::string(e.what()).find(std::to_string(e.step)) != std::string::npos);
    }
}

TEST_CASE("quadratic loss and grid") {
    ToyDataset d{egdlab::DenseMatrix(2, 2), {1, -1}, DatasetKind::train, 0, 1.0};
    d.x(0, 0) = 2;
    d.x(1, 0) = -1;
    CHECK(quadratic_loss({0.5, 0}, d) == doctest::Approx((0.0 + 0.25) / 2));
    const auto g = geometric_grid(100);
    CHECK(g.front() == 0);
    CHECK(g.back() == 100);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
    CHECK(g == std::vector<std::int64_t>{0, 1, 2, 4, 8, 16, 32, 64, 100});
}

TEST_CASE("empirical grok step") {
    ToyConfig c;
    const auto test = sample_test(c, 2000, 1);
    std::vector<LinearIterate> its{{{0, 10}, 0}, {{0.1, 10}, 1}, {{1, 0.1}, 2}};
    CHECK(empirical_grok_step(its, test) == 2);
    its.pop_back();
    CHECK(empirical_grok_step(its, test) == -1);
}
