#pragma once

// Thin SVD and the spectral gradient transforms built on it.
//
// For a gradient matrix G = U S V^T:
//   egd_transform   -> U V^T              (all retained singular values set to 1)
//   ngd_transform   -> U S^-1 V^T         ((G G^T)^+ G)
//   gram_inv_sqrt   -> U S^-1 U^T         ((G G^T)^{+1/2})
//   gram_sqrt       -> U S U^T            ((G G^T)^{1/2})
//   column_normalize divides each column by its Euclidean norm.
//
// Only modes with s > rel_tol * s_max are retained; the zero matrix maps to
// the zero matrix under every transform.

#include <limits>
#include <stdexcept>
#include <vector>

#include "egdlab/matrix.hpp"

namespace egdlab::spectral {

inline constexpr double kDefaultRelTol = 1e-10;

struct SVDResult {
    DenseMatrix u;  // m x r, orthonormal columns
    std::vector<double> s;  // r values, descending
    DenseMatrix v;  // p x r, orthonormal columns
    std::size_t numerical_rank = 0;
    double cutoff = 0.0;  // absolute threshold, rel_tol * s_max
};

struct SpectrumDiagnostics {
    std::vector<double> singular_values;
    // s_max / s_min over retained modes; +inf when nothing is retained.
    double condition_number = std::numeric_limits<double>::infinity();
    double frobenius_norm = 0.0;
    std::size_t numerical_rank = 0;
};

class SvdConvergenceError : public std::runtime_error {
public:
    SvdConvergenceError(std::size_t rows, std::size_t cols, int sweeps);
    std::size_t rows;
    std::size_t cols;
};

// Thin SVD, r = min(m, p). Sign convention: the first entry of each left
// singular vector with magnitude above 1e-12 is positive.
SVDResult svd(const DenseMatrix& m, double rel_tol = kDefaultRelTol);

DenseMatrix egd_transform(const DenseMatrix& g, double rel_tol = kDefaultRelTol);
DenseMatrix column_normalize(const DenseMatrix& g);
DenseMatrix gram_inv_sqrt(const DenseMatrix& g, double rel_tol = kDefaultRelTol);
DenseMatrix gram_sqrt(const DenseMatrix& g, double rel_tol = kDefaultRelTol);
DenseMatrix ngd_transform(const DenseMatrix& g, double rel_tol = kDefaultRelTol);
SpectrumDiagnostics spectrum(const DenseMatrix& g, double rel_tol = kDefaultRelTol);

// Same quantities from a precomputed decomposition.
DenseMatrix egd_from_svd(const SVDResult& d);
SpectrumDiagnostics spectrum_from_svd(const SVDResult& d, double frobenius_norm);

// Moore-Penrose pseudo-inverse via the SVD.
DenseMatrix pseudo_inverse(const DenseMatrix& m, double rel_tol = kDefaultRelTol);

}  // namespace egdlab::spectral
