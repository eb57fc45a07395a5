#pragma once

#include <cstring>
#include <random>

#include "egdlab/matrix.hpp"

namespace testutil {

struct Dims {
    std::size_t a, b, c;
};

inline egdlab::DenseMatrix gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    egdlab::DenseMatrix m(r, c);
    for (double& x : m.values()) x = n(rng);
    return m;
}

// Gaussian factors B (r x k) times C (k x c): rank k almost surely.
inline egdlab::DenseMatrix low_rank(std::size_t r, std::size_t c, std::size_t k, std::uint64_t seed) {
    const auto b = gaussian(r, k, seed);
    const auto cm = gaussian(k, c, seed + 7919);
    egdlab::DenseMatrix out(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < c; ++j) out(i, j) += b(i, l) * cm(l, j);
    return out;
}

// Plain triple loop, independent of the library kernels.
inline egdlab::DenseMatrix naive_matmul(const egdlab::DenseMatrix& a, const egdlab::DenseMatrix& b) {
    egdlab::DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
            out(i, j) = static_cast<double>(s);
        }
    return out;
}

inline bool bitwise_equal(const egdlab::DenseMatrix& a, const egdlab::DenseMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace testutil
