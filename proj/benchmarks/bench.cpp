#include <benchmark/benchmark.h>

#include <vector>

#include "severfit/asymptotics.hpp"
#include "severfit/dist.hpp"
#include "severfit/estimators.hpp"
#include "severfit/framework.hpp"
#include "severfit/mc.hpp"
#include "severfit/moments.hpp"

using namespace severfit;

namespace {

const ThresholdPair kWindow = quantile_thresholds(Model::Exp, 10.0, 1.0, 0.05, 0.05);

void BM_SolveMtum(benchmark::State& state) {
  const double mu = mu_mtum(7.3, kWindow);
  for (auto _ : state) benchmark::DoNotOptimize(solve_mtum_exp(mu, kWindow));
}
BENCHMARK(BM_SolveMtum);

void BM_SolveMcm(benchmark::State& state) {
  const double mu = mu_mcm(7.3, kWindow);
  for (auto _ : state) benchmark::DoNotOptimize(solve_mcm_exp(mu, kWindow));
}
BENCHMARK(BM_SolveMcm);

void BM_SolveParetoMtum(benchmark::State& state) {
  const ThresholdPair t(2.0, 10.0);
  const double mu = pareto_g_du(1.4, t, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_mtum_pareto1(mu, t, 1.0));
}
BENCHMARK(BM_SolveParetoMtum);

void BM_FitSample(benchmark::State& state) {
  RandomSource rng(1, 0);
  const auto x = sample(ExponentialModel(10.0), static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit(Method::MTCM, Model::Exp, x, kWindow));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitSample)->Arg(50)->Arg(1000)->Arg(100000);

void BM_AreTable(benchmark::State& state) {
  const std::vector<double> grid{0.0, 0.05, 0.10, 0.15, 0.25, 0.49, 0.70, 0.85};
  const std::vector<Method> methods{Method::MTuM, Method::MCM, Method::MTCM};
  for (auto _ : state) benchmark::DoNotOptimize(are_table(10.0, grid, grid, methods));
}
BENCHMARK(BM_AreTable);

void BM_IntegralJ(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mtm_integral_J(0.05, 0.95));
}
BENCHMARK(BM_IntegralJ);

void BM_FrameworkReport(benchmark::State& state) {
  const auto F = exponential_adapter(10.0);
  TruncatedSpec spec{{{[](double x) { return x; }, kWindow},
                      {[](double x) { return x * x; }, ThresholdPair(1.0, 20.0)}}};
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_report(F, spec));
}
BENCHMARK(BM_FrameworkReport);

void BM_RunCell(benchmark::State& state) {
  SimCell c;
  c.n = 250;
  c.method = Method::MCM;
  c.thresholds = kWindow;
  c.a = 0.05;
  c.b = 0.05;
  c.blocks = 2;
  c.replications_per_block = 200;
  for (auto _ : state) benchmark::DoNotOptimize(run_cell(c, 1));
}
BENCHMARK(BM_RunCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
