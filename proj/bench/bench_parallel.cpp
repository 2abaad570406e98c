#include <benchmark/benchmark.h>

#include "opsched/trial.hpp"

using namespace opsched;

namespace {

void BM_CohortSerial(benchmark::State& state) {
    const auto config = preset(IterationTag::Iter5);
    const AgentParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_cohort_serial(config, params, static_cast<int>(state.range(0)), 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CohortParallel(benchmark::State& state) {
    const auto config = preset(IterationTag::Iter5);
    const AgentParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_cohort(config, params, static_cast<int>(state.range(0)), 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloSerial(benchmark::State& state) {
    const auto config = preset(IterationTag::Iter3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_earnings_serial(config, 0.9, static_cast<int>(state.range(0)), 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
    const auto config = preset(IterationTag::Iter3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_earnings(config, 0.9, static_cast<int>(state.range(0)), 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_CohortSerial)->Arg(37)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CohortParallel)->Arg(37)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
