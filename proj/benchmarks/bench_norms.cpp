#include <benchmark/benchmark.h>

#include "lambda_lab/construct.hpp"
#include "lambda_lab/expsum.hpp"
#include "lambda_lab/kp.hpp"
#include "lambda_lab/parallel.hpp"

using namespace lambda_lab;

namespace {

FrequencySet parabola(std::int64_t R) { return full_grid(ManifoldSpec(ManifoldKind::MomentCurve, 2), R); }

void run_engine(benchmark::State& state, NormMethod method, double p) {
  set_worker_count(1);
  const FrequencySet f = parabola(state.range(0));
  NormConfig cfg;
  cfg.method = method;
  cfg.samples = 100'000;
  const NormEngine engine(f, p, cfg);
  const auto a = Coefficients::steinhaus(f.size(), 1, 0).values;
  for (auto _ : state) benchmark::DoNotOptimize(engine.moment(a));
  state.counters["points"] = static_cast<double>(f.size());
}

}  // namespace

// Replays on a prebuilt engine; setup is excluded.
static void BM_ExactEvenP4(benchmark::State& s) { run_engine(s, NormMethod::ExactEven, 4.0); }
static void BM_ExactEvenP6(benchmark::State& s) { run_engine(s, NormMethod::ExactEven, 6.0); }
static void BM_QuadratureP5(benchmark::State& s) { run_engine(s, NormMethod::Quadrature, 5.0); }
static void BM_MonteCarloP5(benchmark::State& s) { run_engine(s, NormMethod::MonteCarlo, 5.0); }
BENCHMARK(BM_ExactEvenP4)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactEvenP6)->RangeMultiplier(2)->Range(32, 64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuadratureP5)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloP5)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

static void BM_ExactEvenPlanSetup(benchmark::State& state) {
  const FrequencySet f = parabola(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ExactEvenPlan(f, 2).terms());
}
BENCHMARK(BM_ExactEvenPlanSetup)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

static void BM_Ascent(benchmark::State& state) {
  set_worker_count(1);
  const FrequencySet f = capwise_build(ManifoldSpec(ManifoldKind::MomentCurve, 2), state.range(0), 1);
  KpConfig cfg;
  cfg.restarts = 2;
  cfg.iterations = 20;
  for (auto _ : state) benchmark::DoNotOptimize(ascend_kp(f, 6.0, cfg).bound);
  state.counters["points"] = static_cast<double>(f.size());
}
BENCHMARK(BM_Ascent)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
