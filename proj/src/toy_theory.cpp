#include "egdlab/toy_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace egdlab::toy {

namespace {

constexpr double kClampTol = 1e-12;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("ToyConfig: " + msg);
}

TrajectoryPoint finish_point(const ToyConfig& cfg, std::int64_t k, double mu, double nu) {
    TrajectoryPoint p;
    p.k = k;
    p.mu_k = mu;
    p.nu_k = nu;
    p.l_k = std::sqrt(mu * mu + cfg.epsilon * nu * nu);
    if (p.l_k == 0.0) {
        p.degenerate = true;
        p.r_k = 0.0;
        p.error = 1.0;
        return p;
    }
    p.r_k = mu / p.l_k;
    const double r = constants(cfg).r;
    const double denom = safe_acos(r);
    if (denom == 0.0) {
        p.error = std::abs(p.r_k - 1.0) <= kClampTol ? 0.0 : 1.0;
    } else {
        p.error = std::min(1.0, safe_acos(p.r_k) / denom);
    }
    return p;
}

}  // namespace

void ToyConfig::validate() const {
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
    require(std::isfinite(s) && s >= 0.0, "s must be >= 0");
    require(std::isfinite(theta) && theta > 0.0 && theta < std::numbers::pi / 2, "theta must lie in (0, pi/2)");
    require(std::isfinite(eta) && eta > 0.0, "eta must be > 0");
    require(std::isfinite(u1) && std::isfinite(u2), "u1, u2 must be finite");
    require(std::isfinite(zeta) && zeta >= 0.0, "zeta must be >= 0");
    require(eta * epsilon < 1.0, "eta * epsilon must be < 1");
}

std::array<double, 2> initial_weights(const ToyConfig& cfg) {
    if (cfg.zeta > 0.0) {
        const double n = std::hypot(cfg.u1, cfg.u2);
        if (n == 0.0) throw std::invalid_argument("ToyConfig: zeta rescale needs a nonzero (u1, u2) direction");
        return {cfg.zeta * cfg.u1 / n, cfg.zeta * cfg.u2 / n};
    }
    return {cfg.u1, cfg.u2};
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double safe_acos(double x) {
    // Roundoff can push cosines marginally past +-1.
    if (x > 1.0) x = 1.0;
    if (x < -1.0) x = -1.0;
    return std::acos(x);
}

TheoryConstants constants(const ToyConfig& cfg) {
    cfg.validate();
    const double q = normal_sf(cfg.s);
    if (!(q > 1e-300)) {
        throw std::invalid_argument("constants: Q(s) underflows for s = " + std::to_string(cfg.s) +
                                    "; use a smaller margin s");
    }
    TheoryConstants c;
    c.m1 = normal_pdf(cfg.s) / q;
    c.m2 = 1.0 + cfg.s * c.m1;
    if (!(cfg.eta * c.m2 < 1.0)) {
        throw std::invalid_argument("constants: eta * m2 = " + std::to_string(cfg.eta * c.m2) +
                                    " must be < 1 for a stable GD map");
    }
    c.alpha = 1.0 - cfg.eta * c.m2;
    c.beta = 1.0 - cfg.eta * cfg.epsilon;
    c.rho = std::cos(cfg.theta);
    c.gamma = std::sqrt(c.rho * c.rho + cfg.epsilon * (1.0 - c.rho * c.rho));
    c.r = c.rho / c.gamma;
    return c;
}

TrajectoryPoint trajectory(const ToyConfig& cfg, std::int64_t k) {
    if (k < 0) throw std::invalid_argument("trajectory: k must be >= 0");
    const TheoryConstants c = constants(cfg);
    const auto u = initial_weights(cfg);
    const double ak = std::pow(c.alpha, static_cast<double>(k));
    const double bk = std::pow(c.beta, static_cast<double>(k));
    return finish_point(cfg, k, ak * u[0] + (1.0 - ak) * c.m1 / c.m2, bk * u[1]);
}

double theory_error(const ToyConfig& cfg, std::int64_t k) { return trajectory(cfg, k).error; }

double orthant_error_for(const ToyConfig& cfg, double w1, double w2) {
    const double se = std::sqrt(cfg.epsilon);
    const double wb1 = w1;
    const double wb2 = se * w2;
    const double vb1 = std::cos(cfg.theta);
    const double vb2 = se * std::sin(cfg.theta);
    const double wn = std::hypot(wb1, wb2);
    if (wn == 0.0) return 1.0;
    const double vn = std::hypot(vb1, vb2);
    const double r_wv = (wb1 * vb1 + wb2 * vb2) / (wn * vn);
    const double r_we1 = wb1 / wn;
    const double r_e1v = vb1 / vn;
    const double denom = safe_acos(r_e1v);
    if (denom == 0.0) return 1.0;
    const double e = 0.5 * (1.0 - (safe_acos(r_wv) - safe_acos(r_we1)) / denom);
    return std::clamp(e, 0.0, 1.0);
}

double theory_error_orthant(const ToyConfig& cfg, std::int64_t k) {
    const TrajectoryPoint p = trajectory(cfg, k);
    if (p.degenerate) return 1.0;
    return orthant_error_for(cfg, p.mu_k, p.nu_k);
}

PlateauEstimate plateau_length_asymptotic(const ToyConfig& cfg) {
    const TheoryConstants c = constants(cfg);
    const auto u = initial_weights(cfg);
    PlateauEstimate out;
    if (u[1] == 0.0) return out;
    const double tau = std::abs(u[1]) * std::abs(std::tan(cfg.theta)) * c.m2;
    if (tau > c.m1) {
        out.regime = InitRegime::large_init;
        out.k_star = std::log(tau / c.m1) / std::log(1.0 / c.beta);
    } else {
        out.regime = InitRegime::small_init;
        out.k_star = std::max(0.0, std::log(1.0 / (tau * cfg.epsilon)) / cfg.eta);
    }
    return out;
}

std::int64_t plateau_length_exact(const ToyConfig& cfg, std::int64_t k_max) {
    for (std::int64_t k = 0; k < k_max; ++k) {
        if (theory_error(cfg, k) < 1.0) return k;
    }
    return k_max;
}

TrajectoryPoint egd_trajectory(const ToyConfig& cfg, std::int64_t k) {
    if (k < 0) throw std::invalid_argument("egd_trajectory: k must be >= 0");
    const TheoryConstants c = constants(cfg);
    const auto u = initial_weights(cfg);
    const double ak = std::pow(1.0 - cfg.eta, static_cast<double>(k));
    return finish_point(cfg, k, ak * u[0] + (1.0 - ak) * c.m1 / c.m2, ak * u[1]);
}

double egd_theory_error(const ToyConfig& cfg, std::int64_t k) { return egd_trajectory(cfg, k).error; }

std::int64_t egd_plateau_length_exact(const ToyConfig& cfg, std::int64_t k_max) {
    for (std::int64_t k = 0; k < k_max; ++k) {
        if (egd_theory_error(cfg, k) < 1.0) return k;
    }
    return k_max;
}

const char* to_string(InitRegime r) { return r == InitRegime::large_init ? "large_init" : "small_init"; }

}  // namespace egdlab::toy
