// Microbenchmarks for the sample-sum kernels, comparing the serial reference
// implementation against the two OpenMP variants (fixed-order blocked
// reduction, and the unordered fast reduction) on decomposition-sized data.
//
// Run directly: ./build/bench/bench_kernels [--benchmark_filter=...]
#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <cstdint>

#include "l4dec/kernels.hpp"
#include "l4dec/rng.hpp"

namespace {

using l4dec::kernels::Exec;

struct BenchData {
    Eigen::MatrixXd Y;   // p x n
    Eigen::VectorXd q;   // p, unit
    Eigen::VectorXd v;   // p, unit
    Eigen::VectorXd c;   // n, correlations Y^T q
    Eigen::VectorXd cd;  // n, correlations Y^T v
    Eigen::VectorXd w;   // n, positive weights
};

BenchData make_data(int p, int n, std::uint64_t seed) {
    l4dec::Rng rng(seed);
    BenchData d;
    d.Y.resize(p, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < p; ++i) d.Y(i, j) = rng.normal();
    d.q.resize(p);
    for (int i = 0; i < p; ++i) d.q(i) = rng.normal();
    d.q.normalize();
    d.v.resize(p);
    for (int i = 0; i < p; ++i) d.v(i) = rng.normal();
    d.v.normalize();
    d.c = d.Y.transpose() * d.q;
    d.cd = d.Y.transpose() * d.v;
    d.w = d.c.array().square();
    return d;
}

constexpr int kP = 100;

void BM_quartic_sum(benchmark::State& state, Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const BenchData d = make_data(kP, n, 0xBE01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(l4dec::kernels::quartic_sum(d.Y, d.q, exec));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_quartic_grad(benchmark::State& state, Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const BenchData d = make_data(kP, n, 0xBE02);
    for (auto _ : state) {
        benchmark::DoNotOptimize(l4dec::kernels::quartic_grad(d.Y, d.q, exec));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_quartic_hessvec(benchmark::State& state, Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const BenchData d = make_data(kP, n, 0xBE03);
    for (auto _ : state) {
        benchmark::DoNotOptimize(l4dec::kernels::quartic_hessvec(d.Y, d.c, d.v, exec));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_weighted_gram(benchmark::State& state, Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const BenchData d = make_data(kP, n, 0xBE04);
    for (auto _ : state) {
        benchmark::DoNotOptimize(l4dec::kernels::weighted_gram(d.Y, d.w, exec));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_shifted_quartic_sum(benchmark::State& state, Exec exec) {
    const int n = static_cast<int>(state.range(0));
    const BenchData d = make_data(kP, n, 0xBE05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            l4dec::kernels::shifted_quartic_sum(d.c, d.cd, 0.37, 1.04, exec));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

// The fused gradient pass is the solver's hot loop: sweep sample counts.
BENCHMARK_CAPTURE(BM_quartic_grad, serial, Exec::Serial)
    ->Arg(2000)->Arg(12000)->Arg(50000);
BENCHMARK_CAPTURE(BM_quartic_grad, parallel, Exec::Parallel)
    ->Arg(2000)->Arg(12000)->Arg(50000);
BENCHMARK_CAPTURE(BM_quartic_grad, parallel_fast, Exec::ParallelFast)
    ->Arg(2000)->Arg(12000)->Arg(50000);

BENCHMARK_CAPTURE(BM_quartic_sum, serial, Exec::Serial)->Arg(12000);
BENCHMARK_CAPTURE(BM_quartic_sum, parallel, Exec::Parallel)->Arg(12000);
BENCHMARK_CAPTURE(BM_quartic_sum, parallel_fast, Exec::ParallelFast)->Arg(12000);

BENCHMARK_CAPTURE(BM_quartic_hessvec, serial, Exec::Serial)->Arg(12000);
BENCHMARK_CAPTURE(BM_quartic_hessvec, parallel, Exec::Parallel)->Arg(12000);
BENCHMARK_CAPTURE(BM_quartic_hessvec, parallel_fast, Exec::ParallelFast)->Arg(12000);

BENCHMARK_CAPTURE(BM_weighted_gram, serial, Exec::Serial)->Arg(12000);
BENCHMARK_CAPTURE(BM_weighted_gram, parallel, Exec::Parallel)->Arg(12000);
BENCHMARK_CAPTURE(BM_weighted_gram, parallel_fast, Exec::ParallelFast)->Arg(12000);

BENCHMARK_CAPTURE(BM_shifted_quartic_sum, serial, Exec::Serial)->Arg(12000);
BENCHMARK_CAPTURE(BM_shifted_quartic_sum, parallel, Exec::Parallel)->Arg(12000);
BENCHMARK_CAPTURE(BM_shifted_quartic_sum, parallel_fast, Exec::ParallelFast)->Arg(12000);

BENCHMARK_MAIN();
