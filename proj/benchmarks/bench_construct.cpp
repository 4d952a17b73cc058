#include <benchmark/benchmark.h>

#include "lambda_lab/construct.hpp"
#include "lambda_lab/parallel.hpp"
#include "lambda_lab/select.hpp"

using namespace lambda_lab;

static void BM_Capwise(benchmark::State& state) {
  set_worker_count(1);
  const ManifoldSpec spec(ManifoldKind::EllipticParaboloid, 3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(capwise_build(spec, state.range(0), seed++).size());
}
BENCHMARK(BM_Capwise)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_Moment(benchmark::State& state) {
  set_worker_count(1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(moment_build(3, state.range(0), seed++).size());
}
BENCHMARK(BM_Moment)->Arg(4096)->Arg(32768)->Unit(benchmark::kMillisecond);

static void BM_Hyperbolic(benchmark::State& state) {
  set_worker_count(1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hyperbolic_build(state.range(0), seed++).set.size());
}
BENCHMARK(BM_Hyperbolic)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_BernoulliDraw(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  std::uint64_t draw = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bernoulli_draw(M, 0.1, 3, draw++).size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_BernoulliDraw)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

BENCHMARK_MAIN();
