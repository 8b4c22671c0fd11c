#include <benchmark/benchmark.h>

#include "imatch/experiments.hpp"

using namespace imatch;

namespace {

Market sample(TierScenario kind, Index n, double spacing = 1.0) {
  SweepConfig c;
  c.scenario.kind = kind;
  c.scenario.value_spacing = spacing;
  return Market::sample(make_market_config(c, n, 1), 1);
}

void BM_AdaptiveMatch(benchmark::State& state) {
  const auto market = sample(TierScenario::StrictlyDecreasing, static_cast<Index>(state.range(0)), 0.01);
  for (auto _ : state) {
    auto r = adaptive_match(market, AdaptiveOptions{.record_trace = false});
    benchmark::DoNotOptimize(r.iterations);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AdaptiveMatch)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AdaptiveMatchTiered(benchmark::State& state) {
  const auto market = sample(TierScenario::RandomPartition, static_cast<Index>(state.range(0)));
  for (auto _ : state) {
    auto r = adaptive_match(market, AdaptiveOptions{.record_trace = false});
    benchmark::DoNotOptimize(r.iterations);
  }
}
BENCHMARK(BM_AdaptiveMatchTiered)->Arg(1024)->Unit(benchmark::kMillisecond);

NonAdaptiveParams scaled(Index n) { return NonAdaptiveParams::scaled(n, 4.0, 8.0); }

void BM_BuildPlan(benchmark::State& state) {
  const Index n = static_cast<Index>(state.range(0));
  const auto shape = sample(TierScenario::Mixed, n).shape();
  const auto params = scaled(n);
  for (auto _ : state) {
    auto plan = build_plan(shape, params, 7);
    benchmark::DoNotOptimize(plan.batches.data());
  }
}
BENCHMARK(BM_BuildPlan)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ResolvePlan(benchmark::State& state) {
  const Index n = static_cast<Index>(state.range(0));
  const auto market = sample(TierScenario::SingleTier, n);
  const auto plan = build_plan(market.shape(), scaled(n), 7);
  for (auto _ : state) {
    auto r = resolve_plan(market, plan);
    benchmark::DoNotOptimize(r.matching.size());
  }
}
BENCHMARK(BM_ResolvePlan)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Verify(benchmark::State& state) {
  const Index n = static_cast<Index>(state.range(0));
  const auto market = sample(TierScenario::StrictlyDecreasing, n, 0.01);
  const auto r = adaptive_match(market, AdaptiveOptions{.record_trace = false});
  for (auto _ : state) {
    auto v = verify(market, r.ledger, r.matching);
    benchmark::DoNotOptimize(v.is_interim_stable);
  }
}
BENCHMARK(BM_Verify)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
