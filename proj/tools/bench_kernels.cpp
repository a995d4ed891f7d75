// Microbenchmarks for the kernel layer and the prox solver. Not part of the
// test suite; build target bench_kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lpgcn/kernels.hpp"
#include "lpgcn/prox.hpp"
#include "lpgcn/rng.hpp"

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = lpgcn::uniform_real(rng, -1.0, 1.0);
  return v;
}

void bench_dot(benchmark::State& state, const lpgcn::kernels::Ops& ops) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vec(n, 1);
  const auto b = random_vec(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ops.dot(a.data(), b.data(), n));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * n * 16);
}

void bench_axpy(benchmark::State& state, const lpgcn::kernels::Ops& ops) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vec(n, 3);
  auto y = random_vec(n, 4);
  for (auto _ : state) {
    ops.axpy(1e-9, x.data(), y.data(), n);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * n * 24);
}

void bench_prox(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 1000.0;
  const auto v = random_vec(1024, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lpgcn::prox_lp(v, 1e-4, p));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1024);
}

}  // namespace

BENCHMARK_CAPTURE(bench_dot, scalar, lpgcn::kernels::scalar_ops())->Arg(32)->Arg(1433)->Arg(65536);
BENCHMARK_CAPTURE(bench_dot, simd, lpgcn::kernels::simd_ops())->Arg(32)->Arg(1433)->Arg(65536);
BENCHMARK_CAPTURE(bench_axpy, scalar, lpgcn::kernels::scalar_ops())->Arg(32)->Arg(1433)->Arg(65536);
BENCHMARK_CAPTURE(bench_axpy, simd, lpgcn::kernels::simd_ops())->Arg(32)->Arg(1433)->Arg(65536);
BENCHMARK(bench_prox)->Arg(1001)->Arg(1516)->Arg(2000);

BENCHMARK_MAIN();
