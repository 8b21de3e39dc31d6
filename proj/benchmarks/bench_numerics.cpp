#include <benchmark/benchmark.h>

#include <cmath>

#include "coupling_lab/bounds.hpp"
#include "coupling_lab/densities.hpp"

using namespace coupling_lab;

static void BM_BoundIntegral(benchmark::State& state) {
  const BernsteinSpec specs[] = {BernsteinSpec::stable_pow(1.0),
                                 BernsteinSpec::relativistic(1.0, 1.0),
                                 BernsteinSpec::log_up(1.0, 0.5)};
  const auto& spec = specs[state.range(0)];
  for (auto _ : state) benchmark::DoNotOptimize(bound_integral(spec, 10.0).value);
  state.SetLabel(spec.describe());
}
BENCHMARK(BM_BoundIntegral)->DenseRange(0, 2);

static void BM_Inverse(benchmark::State& state) {
  const auto spec = BernsteinSpec::log_up(1.0, 0.5);
  double s = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse(spec, s));
    s = s < 1e6 ? s * 1.7 : 1e-6;
  }
}
BENCHMARK(BM_Inverse);

static void BM_Density(benchmark::State& state) {
  const auto spec = BernsteinSpec::stable_pow(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(density_1d(spec, 10.0).values.size());
}
BENCHMARK(BM_Density)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_TvEmpirical(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::sin(0.37 * static_cast<double>(i)) * 3.0;
    b[i] = std::cos(0.11 * static_cast<double>(i)) * 3.0 + 0.5;
  }
  for (auto _ : state) benchmark::DoNotOptimize(tv_empirical(a, b, 0.05).value);
}
BENCHMARK(BM_TvEmpirical)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
