#include <benchmark/benchmark.h>

#include "suprec/estimator.hpp"
#include "suprec/montecarlo.hpp"

namespace {

using namespace suprec;

void BM_MeasurementMatrix(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(draw_measurement_matrix(m, 128, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m) * 128);
}
BENCHMARK(BM_MeasurementMatrix)->Arg(4)->Arg(16);

void BM_ProxySample(benchmark::State& state) {
  Rng rng(2);
  const auto phi = draw_measurement_matrix(static_cast<std::size_t>(state.range(0)), 128, rng);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(phi.rows());
  for (auto _ : state) benchmark::DoNotOptimize(proxy_sample(phi, y));
}
BENCHMARK(BM_ProxySample)->Arg(4)->Arg(16);

void BM_RunTrial(benchmark::State& state) {
  ProblemConfig c;
  c.d = 128;
  c.k = 20;
  c.m = 8;
  c.n = static_cast<std::size_t>(state.range(0));
  std::uint64_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(c, trial++));
}
BENCHMARK(BM_RunTrial)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
