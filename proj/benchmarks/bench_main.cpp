#include <benchmark/benchmark.h>

#include <cmath>

#include "bht/kernels.hpp"
#include "bht/normlab.hpp"
#include "bht/oscsym.hpp"
#include "bht/polynomial.hpp"
#include "bht/pvquad.hpp"

namespace {

const bht::Polynomial kP = bht::parse_polynomial("t");
const bht::Polynomial kQ = bht::parse_polynomial("t^2");

void BM_CorrelationDegree(benchmark::State& state) {
  const auto p = bht::parse_polynomial("t^6");
  const auto q = bht::parse_polynomial("3t^4 - 3t^2");
  for (auto _ : state) benchmark::DoNotOptimize(bht::correlation_degree(p, q));
}
BENCHMARK(BM_CorrelationDegree);

void BM_KernelRho(benchmark::State& state) {
  const auto rho = bht::make_rho();
  double t = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho(t));
    t = t < 1.9 ? t + 1e-3 : 0.6;
  }
}
BENCHMARK(BM_KernelRho);

// Symbol cost grows with the frequency step m.
void BM_RescaledSymbol(benchmark::State& state) {
  const bht::PhaseModel model(kP, kQ, 0);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bht::rescaled_symbol(model, m, 2.0, -1.0));
}
BENCHMARK(BM_RescaledSymbol)->Arg(0)->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMicrosecond);

void BM_BhtTruncated(benchmark::State& state) {
  const auto g = bht::TestFunction::gaussian();
  for (auto _ : state) benchmark::DoNotOptimize(bht::bht_truncated(kP, kQ, g, g, 0.3, 1e-6, 64.0));
}
BENCHMARK(BM_BhtTruncated)->Unit(benchmark::kMillisecond);

void BM_LinearOracle(benchmark::State& state) {
  const auto g = bht::TestFunction::gaussian();
  for (auto _ : state) benchmark::DoNotOptimize(bht::linear_multiplier_oracle(1.0, 2.0, g, g, 0.5));
}
BENCHMARK(BM_LinearOracle)->Unit(benchmark::kMillisecond);

void BM_TjTime(benchmark::State& state) {
  const auto g = bht::TestFunction::gaussian();
  const auto xs = bht::linspace(-2.0, 2.0, 65);
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bht::tj(kP, kQ, g, g, j, xs));
}
BENCHMARK(BM_TjTime)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Maximal(benchmark::State& state) {
  const auto g = bht::TestFunction::gaussian();
  const auto grid = bht::default_eps_grid();
  for (auto _ : state) benchmark::DoNotOptimize(bht::maximal(kP, kQ, g, g, 0.0, grid));
}
BENCHMARK(BM_Maximal)->Unit(benchmark::kMillisecond);

void BM_CounterexampleSuite(benchmark::State& state) {
  const auto probes = bht::Catalog::builtin().all();
  const auto xs = bht::linspace(-4.0, 4.0, 33);
  for (auto _ : state) benchmark::DoNotOptimize(bht::counterexample_suite(xs, probes));
}
BENCHMARK(BM_CounterexampleSuite)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
