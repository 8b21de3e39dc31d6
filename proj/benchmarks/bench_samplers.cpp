#include <benchmark/benchmark.h>

#include "coupling_lab/coupling.hpp"
#include "coupling_lab/subordinators.hpp"

using namespace coupling_lab;

namespace {

SubordinatorSampler sampler_for(int which) {
  switch (which) {
    case 0: return SubordinatorSampler::exact_stable(BernsteinSpec::stable_pow(1.0));
    case 1: return SubordinatorSampler::exact_gamma(BernsteinSpec::geometric_stable(1.0));
    case 2: return SubordinatorSampler::tempered_stable(BernsteinSpec::relativistic(1.0, 1.0));
    case 3: return SubordinatorSampler::for_spec(BernsteinSpec::mixed_stable(0.5, 1.0));
    default: return SubordinatorSampler::compound_poisson(BernsteinSpec::stable_pow(1.0), 1e-3);
  }
}

}  // namespace

static void BM_Increment(benchmark::State& state) {
  const auto s = sampler_for(static_cast<int>(state.range(0)));
  const double t = static_cast<double>(state.range(1));
  RngStream rng(1, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_increment(s, t, rng));
  state.SetLabel(s.describe());
}
BENCHMARK(BM_Increment)->ArgsProduct({{0, 1, 2, 3, 4}, {1, 10}});

static void BM_FirstPassage(benchmark::State& state) {
  const auto s = sampler_for(0);
  const double tol = 1.0 / static_cast<double>(state.range(0));
  RngStream rng(1, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(first_passage(s, 1.0, tol, rng).time);
}
BENCHMARK(BM_FirstPassage)->Arg(10)->Arg(100)->Arg(1000);

static void BM_CoupledMarginals(benchmark::State& state) {
  const auto s = sampler_for(0);
  const std::vector<double> x(state.range(0), 0.0), y(state.range(0), 1.0);
  RngStream rng(1, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_coupled_marginals(s, x, y, 2.0, rng));
}
BENCHMARK(BM_CoupledMarginals)->Arg(1)->Arg(3)->Arg(10);

static void BM_TruncatedStable(benchmark::State& state) {
  const auto levy = truncated_stable_levy(1.0, 0.05, 1e-3);
  const double t = static_cast<double>(state.range(0));
  RngStream rng(1, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_cp_levy_increment(levy, t, rng));
}
BENCHMARK(BM_TruncatedStable)->Arg(10)->Arg(100);
