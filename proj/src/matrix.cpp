#include "egdlab/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "egdlab/kernels.hpp"

namespace egdlab {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("DenseMatrix: dimensions must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("DenseMatrix: dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
        throw ShapeError("DenseMatrix: data length " + std::to_string(data_.size()) + " does not match " +
                         shape_string());
    }
    if (!all_finite()) {
        throw std::invalid_argument("DenseMatrix: non-finite entry in " + shape_string() + " input");
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) {
        throw ShapeError("DenseMatrix: empty literal");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw ShapeError("DenseMatrix: ragged literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    if (!all_finite()) {
        throw std::invalid_argument("DenseMatrix: non-finite entry in literal");
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
    DenseMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    constexpr std::size_t kBlock = 32;
    for (std::size_t ib = 0; ib < rows_; ib += kBlock) {
        for (std::size_t jb = 0; jb < cols_; jb += kBlock) {
            const std::size_t ie = std::min(ib + kBlock, rows_);
            const std::size_t je = std::min(jb + kBlock, cols_);
            for (std::size_t i = ib; i < ie; ++i)
                for (std::size_t j = jb; j < je; ++j) t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

double DenseMatrix::frobenius_norm() const {
    // Scaled accumulation, avoids overflow for huge entries.
    double scale = 0.0;
    double ssq = 1.0;
    for (double x : data_) {
        if (x == 0.0) continue;
        const double ax = std::abs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string DenseMatrix::shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw ShapeError("operator+=: " + shape_string() + " vs " + other.shape_string());
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw ShapeError("operator-=: " + shape_string() + " vs " + other.shape_string());
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) { return kernels::parallel::gemm_nn(a, b); }

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff: " + a.shape_string() + " vs " + b.shape_string());
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace egdlab
