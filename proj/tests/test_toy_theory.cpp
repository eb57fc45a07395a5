#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "egdlab/toy_theory.hpp"

using namespace egdlab::toy;

namespace {

// Composite Simpson on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi); }

// Monte-Carlo oracle: draws z ~ N(0, diag(1, eps)) conditioned on
// (z.v) z1 <= 0 and counts sign(z.w) != sign(z1).
double mc_test_error(const ToyConfig& cfg, double w1, double w2, std::size_t n, std::uint64_t seed) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::normal_distribution<double> nd;
    const double v1 = std::cos(cfg.theta), v2 = std::sin(cfg.theta), se = std::sqrt(cfg.epsilon);
    std::size_t kept = 0, wrong = 0;
    while (kept < n) {
        const double z1 = nd(rng), z2 = se * nd(rng);
        if ((z1 * v1 + z2 * v2) * z1 > 0 || z1 == 0) continue;
        ++kept;
        const double score = z1 * w1 + z2 * w2;
        if (score == 0 || (score > 0) != (z1 > 0)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(n);
}

ToyConfig default_cfg() { return ToyConfig{}; }  // eps 0.01, s 1, theta pi/4, eta 0.1, u (0, 10)

}  // namespace

TEST_CASE("constants") {
    ToyConfig c;
    c.s = 0;
    auto k = constants(c);
    CHECK(k.m1 == doctest::Approx(std::sqrt(2 / std::numbers::pi)).epsilon(1e-14));
    CHECK(k.m2 == doctest::Approx(1.0));

    c = ToyConfig{};
    c.epsilon = 1;
    k = constants(c);
    CHECK(k.gamma == doctest::Approx(1.0));
    CHECK(k.r == doctest::Approx(std::cos(c.theta)));

    // truncated-Gaussian moments by quadrature
    c = default_cfg();
    k = constants(c);
    const double mass = simpson(phi, 1.0, 40.0);
    const double first = simpson([](double z) { return z * phi(z); }, 1.0, 40.0);
    const double second = simpson([](double z) { return z * z * phi(z); }, 1.0, 40.0);
    CHECK(k.m1 == doctest::Approx(first / mass).epsilon(1e-10));
    CHECK(k.m2 == doctest::Approx(second / mass).epsilon(1e-10));
    CHECK(k.alpha == doctest::Approx(1 - 0.1 * k.m2));
    CHECK(k.beta == doctest::Approx(1 - 0.1 * 0.01));

    c.s = 50;
    CHECK_THROWS_AS(constants(c), std::invalid_argument);
    c = default_cfg();
    c.eta = 0.5;  // eta m2 > 1
    CHECK_THROWS_AS(constants(c), std::invalid_argument);
}

TEST_CASE("config validation names the field") {
    ToyConfig c;
    c.theta = 2.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("theta"), std::invalid_argument);
    c = ToyConfig{};
    c.epsilon = 0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("epsilon"), std::invalid_argument);
    c = ToyConfig{};
    c.zeta = -1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("zeta"), std::invalid_argument);
}

TEST_CASE("trajectory") {
    ToyConfig c = default_cfg();
    c.u1 = 0.3;
    const auto t0 = trajectory(c, 0);
    CHECK(t0.mu_k == 0.3);
    CHECK(t0.nu_k == 10.0);
    CHECK(t0.l_k * t0.l_k == doctest::Approx(0.09 + 0.01 * 100).epsilon(1e-12));

    c = default_cfg();
    c.s = 0;
    const auto tinf = trajectory(c, 1000000);
    const auto k = constants(c);
    CHECK(tinf.mu_k == doctest::Approx(k.m1 / k.m2));
    CHECK(std::abs(tinf.nu_k) < 1e-12);
    CHECK(tinf.r_k == doctest::Approx(1.0));

    c = default_cfg();
    c.u1 = 2;
    c.u2 = 0;
    for (std::int64_t kk : {0, 1, 10, 1000}) CHECK(trajectory(c, kk).r_k == doctest::Approx(1.0));

    c.u1 = 0;
    c.u2 = 0;
    const auto d = trajectory(c, 0);
    CHECK(d.degenerate);
    CHECK(theory_error(c, 0) == 1.0);
}

TEST_CASE("theory error boundaries") {
    ToyConfig c = default_cfg();
    c.u1 = 1;
    c.u2 = 0;  // r_k == 1
    CHECK(theory_error(c, 5) == 0.0);
    // start exactly on v: r_0 = r
    c = default_cfg();
    const auto k = constants(c);
    c.u1 = std::cos(c.theta);
    c.u2 = std::sin(c.theta);
    CHECK(trajectory(c, 0).r_k == doctest::Approx(k.r));
    CHECK(theory_error(c, 0) == doctest::Approx(1.0));
    CHECK(theory_error_orthant(c, 0) == doctest::Approx(1.0));
    // no NaN even for extreme steps
    for (std::int64_t kk : {0, 1, 1000, 100000000}) CHECK(std::isfinite(theory_error(default_cfg(), kk)));
}

TEST_CASE("theory error matches a Monte-Carlo test error of the population iterate") {
    const ToyConfig c = default_cfg();
    for (std::int64_t k : {0, 1000, 2000, 2800, 3000, 3500, 4000, 5000, 8000, 20000}) {
        const auto t = trajectory(c, k);
        const double mc = mc_test_error(c, t.mu_k, t.nu_k, 200000, 1000 + static_cast<std::uint64_t>(k));
        CHECK(std::abs(theory_error(c, k) - mc) < 0.02);
    }
}

TEST_CASE("orthant form against a 2-D Gaussian Monte-Carlo") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        ToyConfig c;
        c.epsilon = 0.05 + 0.9 * u(rng);
        c.theta = 0.2 + 1.1 * u(rng);
        const double w1 = 2 * u(rng) - 0.5, w2 = 2 * u(rng) - 1;
        const double mc = mc_test_error(c, w1, w2, 1000000, 77 + trial);
        CHECK(std::abs(orthant_error_for(c, w1, w2) - mc) < 0.005);
    }
}

TEST_CASE("min-form and orthant form agree below the plateau") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        ToyConfig c;
        c.epsilon = std::pow(10.0, -3 * u(rng));
        c.theta = 0.1 + 1.3 * u(rng);
        c.s = 2 * u(rng);
        c.u1 = u(rng);       // u1 >= 0
        c.u2 = 20 * u(rng);  // u2 >= 0 keeps w on v's side (see decisions)
        for (auto k : {0L, 10L, 100L, 1000L, 10000L, 100000L}) {
            const double e = theory_error(c, k);
            if (e < 1.0) CHECK(std::abs(e - theory_error_orthant(c, k)) < 0.01);
        }
    }
}

TEST_CASE("theory error is non-increasing after the plateau") {
    for (double u1 : {0.0, 0.5, 3.0}) {
        ToyConfig c = default_cfg();
        c.u1 = u1;
        const auto k0 = plateau_length_exact(c, 100000);
        double prev = theory_error(c, k0);
        for (std::int64_t k = k0 + 1; k < k0 + 20000; k += 7) {
            const double e = theory_error(c, k);
            CHECK(e <= prev + 1e-15);
            prev = e;
        }
    }
}

TEST_CASE("plateau lengths") {
    ToyConfig c = default_cfg();
    const auto est = plateau_length_asymptotic(c);
    CHECK(est.regime == InitRegime::large_init);
    const auto k = constants(c);
    CHECK(est.k_star == doctest::Approx(std::log(10 * k.m2 / k.m1) / std::log(1 / k.beta)));
    CHECK(est.k_star == doctest::Approx(2805.4).epsilon(1e-4));
    const auto exact = plateau_length_exact(c, 100000);
    CHECK(exact == 2806);
    CHECK(std::max<double>(exact, est.k_star) / std::min<double>(exact, est.k_star) < 1.5);

    ToyConfig half = c;
    half.epsilon = c.epsilon / 2;
    const double ratio = plateau_length_asymptotic(half).k_star / est.k_star;
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.2);
    const double exact_ratio =
        static_cast<double>(plateau_length_exact(half, 1000000)) / static_cast<double>(exact);
    CHECK(exact_ratio >= 1.7);
    CHECK(exact_ratio <= 2.3);

    c.u2 = 0;
    CHECK(plateau_length_asymptotic(c).k_star == 0.0);
    CHECK(plateau_length_asymptotic(c).regime == InitRegime::small_init);
    c.u1 = 1;
    CHECK(plateau_length_exact(c, 1000) == 0);

    // small init: formula (1/eta) log(1/(tau eps))
    c = default_cfg();
    c.u2 = 0.1;
    const auto small = plateau_length_asymptotic(c);
    CHECK(small.regime == InitRegime::small_init);
    const double tau = 0.1 * std::tan(c.theta) * k.m2;
    CHECK(small.k_star == doctest::Approx(std::log(1 / (tau * c.epsilon)) / c.eta));
}

TEST_CASE("exact plateau is monotone in |u2|") {
    std::int64_t prev = 0;
    for (double u2 : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        ToyConfig c = default_cfg();
        c.u2 = u2;
        const auto k = plateau_length_exact(c, 1000000);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("egd theory error") {
    const ToyConfig c = default_cfg();
    CHECK(egd_theory_error(c, 0) == theory_error(c, 0));
    CHECK(egd_theory_error(c, 2000) == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<std::int64_t> steps;
    for (double eps : {0.1, 0.01, 0.001}) {
        ToyConfig e = c;
        e.epsilon = eps;
        steps.push_back(egd_plateau_length_exact(e, 100000));
    }
    const auto [lo, hi] = std::minmax_element(steps.begin(), steps.end());
    CHECK(*hi < 2 * *lo);
    CHECK(*hi <= static_cast<std::int64_t>(std::ceil(4 / c.eta)));
}
