// Serial reference kernels vs their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>

#include "egdlab/kernels.hpp"
#include "egdlab/spectral.hpp"

namespace {

egdlab::DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    egdlab::DenseMatrix m(r, c);
    for (double& x : m.values()) x = n(rng);
    return m;
}

template <egdlab::DenseMatrix (*Gemm)(const egdlab::DenseMatrix&, const egdlab::DenseMatrix&)>
void BM_gemm_nn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_matrix(n, n, 1);
    const auto b = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Gemm(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <egdlab::DenseMatrix (*Gemm)(const egdlab::DenseMatrix&, const egdlab::DenseMatrix&)>
void BM_gemm_tn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_matrix(n, n, 3);
    const auto b = random_matrix(n, n, 4);
    for (auto _ : state) benchmark::DoNotOptimize(Gemm(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

void BM_svd(benchmark::State& state) {
    const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 5);
    egdlab::kernels::set_num_threads(static_cast<int>(state.range(2)));
    for (auto _ : state) benchmark::DoNotOptimize(egdlab::spectral::svd(m));
    egdlab::kernels::set_num_threads(0);
}

}  // namespace

BENCHMARK(BM_gemm_nn<egdlab::kernels::serial::gemm_nn>)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gemm_nn<egdlab::kernels::parallel::gemm_nn>)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gemm_tn<egdlab::kernels::serial::gemm_tn>)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_gemm_tn<egdlab::kernels::parallel::gemm_tn>)->Arg(64)->Arg(256)->Arg(512);
// rows, cols, OpenMP threads (1 = serial sweep order)
BENCHMARK(BM_svd)->Args({100, 50, 1})->Args({100, 50, 0})->Args({512, 194, 1})->Args({512, 194, 0});

BENCHMARK_MAIN();
