#include "egdlab/toy_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "egdlab/spectral.hpp"

namespace egdlab::toy {

namespace {

constexpr double kMinAcceptance = 1e-6;
constexpr double kDivergenceNorm = 1e12;

template <class Accept>
ToyDataset rejection_sample(const ToyConfig& cfg, std::size_t n, std::uint64_t seed, DatasetKind kind,
                            Accept accept) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double se = std::sqrt(cfg.epsilon);
    ToyDataset out{DenseMatrix(n, 2), std::vector<double>(n), kind, seed, 1.0};
    std::size_t accepted = 0;
    std::uint64_t drawn = 0;
    while (accepted < n) {
        const double z1 = normal(rng);
        const double z2 = se * normal(rng);
        ++drawn;
        if (z1 == 0.0 || !accept(z1, z2)) continue;
        out.x(accepted, 0) = z1;
        out.x(accepted, 1) = z2;
        out.y[accepted] = z1 > 0.0 ? 1.0 : -1.0;
        ++accepted;
    }
    out.acceptance_rate = static_cast<double>(n) / static_cast<double>(drawn);
    return out;
}

void check_divergence(const std::array<double, 2>& w, std::int64_t k) {
    if (!std::isfinite(w[0]) || !std::isfinite(w[1]) || std::hypot(w[0], w[1]) > kDivergenceNorm) {
        throw DivergenceError("toy GD diverged at step " + std::to_string(k), k);
    }
}

struct Moments {
    Sym2 sigma;
    std::array<double, 2> xty{};
};

Moments moments(const ToyDataset& data) {
    Moments m;
    const std::size_t n = data.x.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = data.x(i, 0);
        const double b = data.x(i, 1);
        m.sigma.a += a * a;
        m.sigma.b += a * b;
        m.sigma.c += b * b;
        m.xty[0] += a * data.y[i];
        m.xty[1] += b * data.y[i];
    }
    const double inv = 1.0 / static_cast<double>(n);
    m.sigma.a *= inv;
    m.sigma.b *= inv;
    m.sigma.c *= inv;
    m.xty[0] *= inv;
    m.xty[1] *= inv;
    return m;
}

DenseMatrix as_matrix(const Sym2& s) { return DenseMatrix{{s.a, s.b}, {s.b, s.c}}; }

std::array<double, 2> apply(const DenseMatrix& m, const std::array<double, 2>& v) {
    return {m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]};
}

}  // namespace

ToyDataset sample_train(const ToyConfig& cfg, std::size_t n, std::uint64_t seed) {
    cfg.validate();
    if (2.0 * normal_sf(cfg.s) < kMinAcceptance) {
        throw std::invalid_argument("sample_train: acceptance probability 2Q(s) below 1e-6; use a smaller s");
    }
    const double s = cfg.s;
    return rejection_sample(cfg, n, seed, DatasetKind::train, [s](double z1, double) { return std::abs(z1) >= s; });
}

ToyDataset sample_test(const ToyConfig& cfg, std::size_t n, std::uint64_t seed) {
    const TheoryConstants c = constants(cfg);
    if (safe_acos(c.r) / std::numbers::pi < kMinAcceptance) {
        throw std::invalid_argument("sample_test: acceptance probability below 1e-6; increase theta or epsilon");
    }
    const double v1 = std::cos(cfg.theta);
    const double v2 = std::sin(cfg.theta);
    return rejection_sample(cfg, n, seed, DatasetKind::test,
                            [=](double z1, double z2) { return (z1 * v1 + z2 * v2) * z1 <= 0.0; });
}

GdRun run_vanilla_gd(const ToyDataset& data, const ToyConfig& cfg, std::int64_t k_max) {
    if (data.kind != DatasetKind::train) throw std::invalid_argument("run_vanilla_gd: needs a train dataset");
    const Moments m = moments(data);
    GdRun run;
    run.sigma_hat = m.sigma;
    run.xty = m.xty;
    run.w_ols = apply(spectral::pseudo_inverse(as_matrix(m.sigma)), m.xty);

    std::array<double, 2> w = initial_weights(cfg);
    run.iterates.reserve(static_cast<std::size_t>(k_max) + 1);
    run.iterates.push_back({w, 0});
    const Sym2& s = m.sigma;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const double g0 = s.a * w[0] + s.b * w[1] - m.xty[0];
        const double g1 = s.b * w[0] + s.c * w[1] - m.xty[1];
        w = {w[0] - cfg.eta * g0, w[1] - cfg.eta * g1};
        check_divergence(w, k);
        run.iterates.push_back({w, k});
    }
    return run;
}

GdRun run_egd_toy(const ToyDataset& data, const ToyConfig& cfg, std::int64_t k_max) {
    if (data.kind != DatasetKind::train) throw std::invalid_argument("run_egd_toy: needs a train dataset");
    const Moments m = moments(data);
    const DenseMatrix pinv = spectral::pseudo_inverse(as_matrix(m.sigma));
    GdRun run;
    run.sigma_hat = m.sigma;
    run.xty = m.xty;
    run.w_ols = apply(pinv, m.xty);

    std::array<double, 2> w = initial_weights(cfg);
    run.iterates.reserve(static_cast<std::size_t>(k_max) + 1);
    run.iterates.push_back({w, 0});
    const Sym2& s = m.sigma;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const std::array<double, 2> g{s.a * w[0] + s.b * w[1] - m.xty[0], s.b * w[0] + s.c * w[1] - m.xty[1]};
        const auto pg = apply(pinv, g);
        w = {w[0] - cfg.eta * pg[0], w[1] - cfg.eta * pg[1]};
        check_divergence(w, k);
        run.iterates.push_back({w, k});
    }
    return run;
}

LinearIterate closed_form_vanilla(const Sym2& sh, const std::array<double, 2>& w_ols,
                                  const std::array<double, 2>& w0, double eta, std::int64_t k) {
    // Eigenpairs of the symmetric 2x2 Sigma_hat.
    const double mean = 0.5 * (sh.a + sh.c);
    const double rad = std::hypot(0.5 * (sh.a - sh.c), sh.b);
    const double l1 = mean + rad;
    const double l2 = mean - rad;
    double q1x = 1.0;
    double q1y = 0.0;
    if (sh.b != 0.0) {
        q1x = l1 - sh.c;
        q1y = sh.b;
        const double n = std::hypot(q1x, q1y);
        q1x /= n;
        q1y /= n;
    } else if (sh.c > sh.a) {
        q1x = 0.0;
        q1y = 1.0;
    }
    const double q2x = -q1y;
    const double q2y = q1x;
    const double p1 = std::pow(1.0 - eta * l1, static_cast<double>(k));
    const double p2 = std::pow(1.0 - eta * l2, static_cast<double>(k));
    // A^k = p1 q1 q1^T + p2 q2 q2^T
    const double a00 = p1 * q1x * q1x + p2 * q2x * q2x;
    const double a01 = p1 * q1x * q1y + p2 * q2x * q2y;
    const double a11 = p1 * q1y * q1y + p2 * q2y * q2y;
    const std::array<double, 2> d{w0[0] - w_ols[0], w0[1] - w_ols[1]};
    return {{w_ols[0] + a00 * d[0] + a01 * d[1], w_ols[1] + a01 * d[0] + a11 * d[1]}, k};
}

LinearIterate closed_form_egd(const std::array<double, 2>& w_ols, const std::array<double, 2>& w0, double eta,
                              std::int64_t k) {
    const double ak = std::pow(1.0 - eta, static_cast<double>(k));
    return {{ak * w0[0] + (1.0 - ak) * w_ols[0], ak * w0[1] + (1.0 - ak) * w_ols[1]}, k};
}

double empirical_error(const std::array<double, 2>& w, const ToyDataset& test) {
    const std::size_t n = test.x.rows();
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double score = test.x(i, 0) * w[0] + test.x(i, 1) * w[1];
        if (score == 0.0 || (score > 0.0) != (test.y[i] > 0.0)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(n);
}

double quadratic_loss(const std::array<double, 2>& w, const ToyDataset& data) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.x.rows(); ++i) {
        const double r = data.x(i, 0) * w[0] + data.x(i, 1) * w[1] - data.y[i];
        acc += r * r;
    }
    return acc / static_cast<double>(data.x.rows());
}

std::int64_t empirical_grok_step(const std::vector<LinearIterate>& iterates, const ToyDataset& test) {
    for (const auto& it : iterates) {
        if (empirical_error(it.w, test) < 1.0) return it.k;
    }
    return -1;
}

std::vector<std::int64_t> geometric_grid(std::int64_t k_max) {
    std::vector<std::int64_t> grid{0};
    for (std::int64_t k = 1; k < k_max; k *= 2) grid.push_back(k);
    if (k_max > 0) grid.push_back(k_max);
    return grid;
}

}  // namespace egdlab::toy
