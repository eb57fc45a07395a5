#include "doctest.h"
#include "egdlab/kernels.hpp"
#include "test_util.hpp"

namespace k = egdlab::kernels;
using egdlab::DenseMatrix;

namespace {

DenseMatrix sparse_gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
    auto m = testutil::gaussian(r, c, seed);
    std::size_t i = 0;
    for (double& x : m.values())
        if (++i % 3 == 0) x = 0.0;
    return m;
}

}  // namespace

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
    for (int threads : {1, 2, 4}) {
        k::set_num_threads(threads);
        for (auto [m, n, p] : {testutil::Dims{1, 1, 1}, {5, 3, 7}, {64, 128, 64}, {300, 97, 211}}) {
            const auto a = sparse_gaussian(m, n, 1 + m);
            const auto b = testutil::gaussian(n, p, 2 + p);
            const auto bt = testutil::gaussian(p, n, 3 + p);
            const auto at = sparse_gaussian(n, m, 4 + m);
            CHECK(testutil::bitwise_equal(k::serial::gemm_nn(a, b), k::parallel::gemm_nn(a, b)));
            CHECK(testutil::bitwise_equal(k::serial::gemm_nt(a, bt), k::parallel::gemm_nt(a, bt)));
            CHECK(testutil::bitwise_equal(k::serial::gemm_tn(at, b), k::parallel::gemm_tn(at, b)));
            auto r1 = a;
            auto r2 = a;
            r1(0, 0) = -0.0;
            r2(0, 0) = -0.0;
            k::serial::relu_inplace(r1);
            k::parallel::relu_inplace(r2);
            CHECK(testutil::bitwise_equal(r1, r2));
        }
    }
    k::set_num_threads(0);
}

TEST_CASE("kernels agree with the naive product") {
    const auto a = sparse_gaussian(40, 30, 9);
    const auto b = testutil::gaussian(30, 20, 10);
    CHECK(egdlab::max_abs_diff(k::serial::gemm_nn(a, b), testutil::naive_matmul(a, b)) < 1e-12);
    CHECK(egdlab::max_abs_diff(k::serial::gemm_nt(a, b.transposed()), testutil::naive_matmul(a, b)) < 1e-12);
    CHECK(egdlab::max_abs_diff(k::serial::gemm_tn(a.transposed(), b), testutil::naive_matmul(a, b)) < 1e-12);
    CHECK_THROWS_AS(k::serial::gemm_nn(a, a), egdlab::ShapeError);
    CHECK_THROWS_AS(k::parallel::gemm_tn(a, b), egdlab::ShapeError);
}

TEST_CASE("relu zeroes negatives only") {
    DenseMatrix m{{-1.0, 0.0, 2.5}};
    k::serial::relu_inplace(m);
    CHECK(m == DenseMatrix{{0.0, 0.0, 2.5}});
}
