#include <benchmark/benchmark.h>

#include "overage/analytic.hpp"
#include "overage/quadrature.hpp"
#include "overage/simulator.hpp"

using namespace overage;

static void BM_ClosedMm12Star(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(closed_mm12star(1.0, 2.0, 1.0));
}
BENCHMARK(BM_ClosedMm12Star);

static void BM_QuadratureMg11Gamma(benchmark::State& state) {
  const Scenario s{QueueModel::MG11, 1.0, ServiceDistribution::gamma(2.0, 4.0), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_quadrature(s));
}
BENCHMARK(BM_QuadratureMg11Gamma)->Unit(benchmark::kMillisecond);

static void BM_QuadratureMg12StarGamma(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 2.0;
  const Scenario s{QueueModel::MG12Star, 1.0, ServiceDistribution::gamma_with_mean(alpha, 0.5), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_quadrature(s));
}
BENCHMARK(BM_QuadratureMg12StarGamma)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_QuadratureMm1(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mm1_metrics(1.0, 2.0, 1.0));
}
BENCHMARK(BM_QuadratureMm1)->Unit(benchmark::kMillisecond);

static void BM_Simulation(benchmark::State& state) {
  const auto model = static_cast<QueueModel>(state.range(0));
  const Scenario s{model, 1.0, ServiceDistribution::exponential(2.0), 1.0};
  SimConfig config;
  config.total_generated_packets = 100'000;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(s, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.total_generated_packets));
}
BENCHMARK(BM_Simulation)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
