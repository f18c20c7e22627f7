#include <benchmark/benchmark.h>

#include "tspt/dgp.hpp"
#include "tspt/estimators.hpp"
#include "tspt/testing.hpp"

namespace {

void BM_OlsFit(benchmark::State& state) {
  const auto data = tspt::gen_mdep_regression(1, 3, static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tspt::ols_fit(data));
  }
}
BENCHMARK(BM_OlsFit)->Arg(100)->Arg(1000);

void BM_HacGamma(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto data = tspt::gen_mdep_regression(1, 3, n, 7);
  const auto fit = tspt::ols_fit(data);
  const int bandwidth = tspt::default_bandwidth(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tspt::hac_gamma(data, fit, bandwidth, 1e-4));
  }
}
BENCHMARK(BM_HacGamma)->Arg(100)->Arg(1000)->Arg(10000);

void BM_RegressionPermTest(benchmark::State& state) {
  const auto data = tspt::gen_mdep_regression(1, 3, static_cast<int>(state.range(0)), 7);
  tspt::TestConfig cfg;
  cfg.permutations = 200;
  cfg.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tspt::regression_perm_test(data, cfg));
  }
}
BENCHMARK(BM_RegressionPermTest)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_TrendPermTest(benchmark::State& state) {
  const auto series = tspt::gen_ar1(0.5, static_cast<int>(state.range(0)), 7);
  tspt::TestConfig cfg;
  cfg.permutations = 200;
  cfg.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tspt::trend_perm_test(series, cfg));
  }
}
BENCHMARK(BM_TrendPermTest)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GenVar2(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(tspt::gen_var2(0.8, static_cast<int>(state.range(0)), 11));
  }
}
BENCHMARK(BM_GenVar2)->Arg(1000)->Arg(10000);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
