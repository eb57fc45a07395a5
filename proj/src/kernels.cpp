#include "egdlab/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace egdlab::kernels {

namespace {

inline void axpy(std::size_t n, double alpha, const double* __restrict x, double* __restrict y) {
    for (std::size_t l = 0; l < n; ++l) y[l] += alpha * x[l];
}

void check_inner(const char* what, std::size_t lhs, std::size_t rhs) {
    if (lhs != rhs) {
        throw ShapeError(std::string(what) + ": inner dimensions differ (" + std::to_string(lhs) + " vs " +
                         std::to_string(rhs) + ")");
    }
}

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

}  // namespace

namespace serial {

DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("gemm_nn", a.cols(), b.rows());
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            axpy(n, aik, b.row(k).data(), crow);
        }
    }
    return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("gemm_nt", a.cols(), b.cols());
    return gemm_nn(a, b.transposed());
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("gemm_tn", a.rows(), b.rows());
    DenseMatrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* brow = b.row(i).data();
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            axpy(n, aij, brow, c.row(j).data());
        }
    }
    return c;
}

void relu_inplace(DenseMatrix& m) {
    for (double& x : m.values()) x = x > 0.0 ? x : 0.0;
}

}  // namespace serial

namespace parallel {

DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("gemm_nn", a.cols(), b.rows());
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    const std::size_t inner = a.cols();
    const auto rows = static_cast<std::ptrdiff_t>(a.rows());
    const bool go_parallel = a.rows() * inner * n >= kParallelWork;
#pragma omp parallel for schedule(static) if (go_parallel)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        double* crow = c.row(static_cast<std::size_t>(i)).data();
        const double* arow = a.row(static_cast<std::size_t>(i)).data();
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            axpy(n, aik, b.row(k).data(), crow);
        }
    }
    return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("gemm_nt", a.cols(), b.cols());
    return gemm_nn(a, b.transposed());
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
    check_inner("gemm_tn", a.rows(), b.rows());
    DenseMatrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    const std::size_t samples = a.rows();
    const auto outs = static_cast<std::ptrdiff_t>(a.cols());
    const bool go_parallel = samples * a.cols() * n >= kParallelWork;
    // Each thread owns whole output rows; the sample loop stays in ascending
    // order so every entry sees the same summation sequence as the serial kernel.
#pragma omp parallel for schedule(static) if (go_parallel)
    for (std::ptrdiff_t j = 0; j < outs; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        double* crow = c.row(jj).data();
        for (std::size_t i = 0; i < samples; ++i) {
            const double aij = a(i, jj);
            if (aij == 0.0) continue;
            axpy(n, aij, b.row(i).data(), crow);
        }
    }
    return c;
}

void relu_inplace(DenseMatrix& m) {
    auto v = m.values();
    const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) if (v.size() >= kParallelWork)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double& x = v[static_cast<std::size_t>(i)];
        x = x > 0.0 ? x : 0.0;
    }
}

}  // namespace parallel

void set_num_threads(int n) { omp_set_num_threads(n > 0 ? n : omp_get_num_procs()); }

int num_threads() { return omp_get_max_threads(); }

}  // namespace egdlab::kernels
