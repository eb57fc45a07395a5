#include <cmath>
#include <limits>

#include "doctest.h"
#include "egdlab/kernels.hpp"
#include "egdlab/matrix.hpp"
#include "test_util.hpp"

using egdlab::DenseMatrix;

TEST_CASE("construction validates shape and finiteness") {
    CHECK_THROWS_AS(DenseMatrix(0, 3), egdlab::ShapeError);
    CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), egdlab::ShapeError);
    CHECK_THROWS(DenseMatrix(1, 2, {1.0, std::nan("")}));
    CHECK_THROWS(DenseMatrix(1, 1, {std::numeric_limits<double>::infinity()}));
    const DenseMatrix m{{1, 2, 3}, {4, 5, 6}};
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6.0);
    CHECK(m.shape_string() == "2x3");
}

TEST_CASE("transpose, norms and arithmetic") {
    const auto a = testutil::gaussian(37, 53, 1);
    const auto t = a.transposed();
    REQUIRE(t.rows() == 53);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) CHECK(t(j, i) == a(i, j));
    CHECK(t.transposed() == a);

    double s = 0;
    for (double x : a.values()) s += x * x;
    CHECK(a.frobenius_norm() == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
    // scaled accumulation must not overflow
    const DenseMatrix big{{1e200, 1e200}};
    CHECK(big.frobenius_norm() == doctest::Approx(std::sqrt(2.0) * 1e200));

    const DenseMatrix sum = a + a;
    CHECK(egdlab::max_abs_diff(sum, 2.0 * a) == 0.0);
    CHECK(egdlab::max_abs_diff(sum - a, a) == 0.0);
    CHECK_THROWS_AS(a + t, egdlab::ShapeError);
}

TEST_CASE("matmul matches a naive triple loop") {
    for (auto [m, k, n] : {testutil::Dims{1, 1, 1}, {3, 5, 2}, {17, 64, 33}, {100, 7, 90}}) {
        const auto a = testutil::gaussian(m, k, 10 + m);
        const auto b = testutil::gaussian(k, n, 20 + n);
        CHECK(egdlab::max_abs_diff(egdlab::matmul(a, b), testutil::naive_matmul(a, b)) < 1e-12 * k);
    }
    CHECK_THROWS_AS(egdlab::matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), egdlab::ShapeError);
}

TEST_CASE("identity and diagonal factories") {
    const auto i3 = DenseMatrix::identity(3);
    CHECK(egdlab::max_abs_diff(i3, DenseMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 0.0);
    const std::vector<double> d{2.0, -1.0};
    CHECK(DenseMatrix::diagonal(d) == DenseMatrix{{2, 0}, {0, -1}});
}
