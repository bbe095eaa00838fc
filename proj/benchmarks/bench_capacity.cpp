#include <benchmark/benchmark.h>

#include "molcap/channel.hpp"
#include "molcap/scenarios.hpp"
#include "molcap/solver.hpp"

namespace {

using namespace molcap;

const LigandParams kPaperRates{0.0004, 0.1};

void BM_BuildChannel(benchmark::State& state) {
  ScenarioConfig config{16, 5, 1, 80.0, 40.0, 0.0};
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_channel(config, kPaperRates, grid));
  }
}
BENCHMARK(BM_BuildChannel)->Arg(201)->Arg(401);

void BM_UnconstrainedSolve(benchmark::State& state) {
  ScenarioConfig config{16, 5, 1, 80.0, 80.0, 0.0};
  const auto channel =
      build_channel(config, kPaperRates, static_cast<int>(state.range(0)));
  SolverOptions opts;
  opts.tolerance = 1e-7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(blahut_arimoto(channel, opts));
  }
}
BENCHMARK(BM_UnconstrainedSolve)->Arg(101)->Arg(201)
    ->Unit(benchmark::kMillisecond);

void BM_ConstrainedSolve(benchmark::State& state) {
  ScenarioConfig config{16, 5, 1, 80.0, 40.0, 0.0};
  const auto channel =
      build_channel(config, kPaperRates, static_cast<int>(state.range(0)));
  SolverOptions opts;
  opts.tolerance = 1e-7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(blahut_arimoto_constrained(channel, 40.0, opts));
  }
}
BENCHMARK(BM_ConstrainedSolve)->Arg(101)->Arg(201)
    ->Unit(benchmark::kMillisecond);

void BM_BlockingBuild(benchmark::State& state) {
  ScenarioConfig config{16, 5, 2, 80.0, 40.0, 0.0};
  BlockingParams rates;
  rates.colonies.assign(2, ColonyRates{{0.0004, 0.1}, {0.0005, 0.01}});
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_blocking_channel(config, rates, grid));
  }
}
BENCHMARK(BM_BlockingBuild)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_BlockingSolve(benchmark::State& state) {
  ScenarioConfig config{16, 5, 2, 80.0, 40.0, 0.0};
  BlockingParams rates;
  rates.colonies.assign(2, ColonyRates{{0.0004, 0.1}, {0.0005, 0.01}});
  SolverOptions opts;
  opts.tolerance = 1e-5;
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ts_blocking_capacity(config, rates, opts, grid));
  }
}
BENCHMARK(BM_BlockingSolve)->Arg(15)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
