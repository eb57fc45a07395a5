#pragma once

// Finite-sample simulation of the toy problem: rejection sampling of the
// conditioned train/test laws, full-batch GD and the Sigma_hat^-1
// preconditioned variant, and empirical test error.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "egdlab/matrix.hpp"
#include "egdlab/toy_theory.hpp"

namespace egdlab::toy {

enum class DatasetKind { train, test };

struct ToyDataset {
    DenseMatrix x;  // n x 2
    std::vector<double> y;  // +-1, sign of x1
    DatasetKind kind = DatasetKind::train;
    std::uint64_t seed = 0;
    double acceptance_rate = 1.0;
};

struct LinearIterate {
    std::array<double, 2> w{};
    std::int64_t k = 0;
};

struct Sym2 {
    double a = 0, b = 0, c = 0;  // [[a, b], [b, c]]
};

struct GdRun {
    std::vector<LinearIterate> iterates;  // k = 0 .. k_max
    Sym2 sigma_hat;                       // X^T X / n
    std::array<double, 2> xty{};          // X^T Y / n
    std::array<double, 2> w_ols{};        // Sigma_hat^+ X^T Y / n
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::int64_t step) : std::runtime_error(what), step(step) {}
    std::int64_t step;
};

ToyDataset sample_train(const ToyConfig& cfg, std::size_t n, std::uint64_t seed);
ToyDataset sample_test(const ToyConfig& cfg, std::size_t n, std::uint64_t seed);

// w(k) = w(k-1) - eta X^T (X w(k-1) - Y) / n, iterated through the
// sufficient statistics Sigma_hat and X^T Y / n.
GdRun run_vanilla_gd(const ToyDataset& data, const ToyConfig& cfg, std::int64_t k_max);

// w(k) = w(k-1) - eta Sigma_hat^+ X^T (X w(k-1) - Y) / n
GdRun run_egd_toy(const ToyDataset& data, const ToyConfig& cfg, std::int64_t k_max);

// A^k w0 + (I - A^k) w_ols with A = I - eta Sigma_hat, via the eigendecomposition.
LinearIterate closed_form_vanilla(const Sym2& sigma_hat, const std::array<double, 2>& w_ols,
                                  const std::array<double, 2>& w0, double eta, std::int64_t k);

// a^k w0 + (1 - a^k) w_ols with a = 1 - eta.
LinearIterate closed_form_egd(const std::array<double, 2>& w_ols, const std::array<double, 2>& w0, double eta,
                              std::int64_t k);

// Fraction of rows with sign(x.w) != y; x.w == 0 counts as an error.
double empirical_error(const std::array<double, 2>& w, const ToyDataset& test);

// Mean squared loss (1/n) ||X w - Y||^2.
double quadratic_loss(const std::array<double, 2>& w, const ToyDataset& data);

// First index into `iterates` whose empirical error is below 1, or -1.
std::int64_t empirical_grok_step(const std::vector<LinearIterate>& iterates, const ToyDataset& test);

// 0, 1, 2, 4, ..., plus k_max.
std::vector<std::int64_t> geometric_grid(std::int64_t k_max);

}  // namespace egdlab::toy
