#pragma once

// Closed-form theory of linear least-squares gradient descent on the
// anisotropic two-feature toy problem: train features are z ~ N(0, diag(1, eps))
// folded to |z1| >= s, test features are conditioned on (z.v) z1 <= 0 with
// v = (cos theta, sin theta), labels are sign(z1).
//
// With large n the GD iterate tracks w(k) ~ (mu_k, nu_k) where
//   mu_k = alpha^k u1 + (1 - alpha^k) m1/m2,   nu_k = beta^k u2,
// and the test error follows min(1, arccos(r_k) / arccos(r)).

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace egdlab::toy {

struct ToyConfig {
    double epsilon = 0.01;  // variance of the slow feature
    double s = 1.0;         // training margin half-width
    double theta = 0.7853981633974483;  // angle between v and e1
    double eta = 0.1;       // step size
    double u1 = 0.0;        // initial weights
    double u2 = 10.0;
    double zeta = 0.0;      // if > 0, (u1, u2) is rescaled to this norm

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Starting point after applying the optional zeta rescale.
std::array<double, 2> initial_weights(const ToyConfig& cfg);

struct TheoryConstants {
    double m1 = 0;     // E|x1| under the folded train law
    double m2 = 0;     // E x1^2
    double alpha = 0;  // 1 - eta m2
    double beta = 0;   // 1 - eta eps
    double rho = 0;    // cos theta
    double gamma = 0;  // sqrt(rho^2 + eps (1 - rho^2))
    double r = 0;      // rho / gamma
};

struct TrajectoryPoint {
    std::int64_t k = 0;
    double mu_k = 0;
    double nu_k = 0;
    double l_k = 0;
    double r_k = 0;
    double error = 1;
    bool degenerate = false;  // l_k == 0; error pinned to 1
};

enum class InitRegime { large_init, small_init };

struct PlateauEstimate {
    double k_star = 0;
    InitRegime regime = InitRegime::small_init;
};

// Standard normal density, CDF and survival function (erfc based).
double normal_pdf(double x);
double normal_cdf(double x);
double normal_sf(double x);

// clamp to [-1, 1] then arccos
double safe_acos(double x);

TheoryConstants constants(const ToyConfig& cfg);
TrajectoryPoint trajectory(const ToyConfig& cfg, std::int64_t k);
double theory_error(const ToyConfig& cfg, std::int64_t k);
double theory_error_orthant(const ToyConfig& cfg, std::int64_t k);

// Orthant form for an arbitrary weight vector w (Sigma-weighted cosines).
double orthant_error_for(const ToyConfig& cfg, double w1, double w2);

PlateauEstimate plateau_length_asymptotic(const ToyConfig& cfg);

// First k with theory_error(cfg, k) < 1, or k_max if the scan never gets there.
std::int64_t plateau_length_exact(const ToyConfig& cfg, std::int64_t k_max);

// Preconditioned dynamics: both coordinates contract at a = 1 - eta.
TrajectoryPoint egd_trajectory(const ToyConfig& cfg, std::int64_t k);
double egd_theory_error(const ToyConfig& cfg, std::int64_t k);
std::int64_t egd_plateau_length_exact(const ToyConfig& cfg, std::int64_t k_max);

const char* to_string(InitRegime r);

}  // namespace egdlab::toy
