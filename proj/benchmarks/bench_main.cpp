#include <benchmark/benchmark.h>

#include "singlet/analysis.hpp"
#include "singlet/geometry.hpp"
#include "singlet/montecarlo.hpp"
#include "singlet/protocols.hpp"
#include "singlet/singlet_model.hpp"

using namespace singlet;

static void BM_ExactTable(benchmark::State& state) {
  const Settings s{UnitVec3::ex(), planar_direction_deg(60)};
  for (auto _ : state) benchmark::DoNotOptimize(averaged_table(s));
}
BENCHMARK(BM_ExactTable);

static void BM_RunExperiment(benchmark::State& state) {
  const Settings s{UnitVec3::ex(), planar_direction_deg(45)};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(s, n, 1, {threads, {}}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunExperiment)->Args({1 << 20, 1})->Args({1 << 20, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_ChshOptimize(benchmark::State& state) {
  const Correlator e = model_correlator();
  for (auto _ : state) benchmark::DoNotOptimize(chsh_optimize(e, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ChshOptimize)->Arg(72)->Arg(360)->Unit(benchmark::kMillisecond);

static void BM_Conspiracy(benchmark::State& state) {
  ConspiracyConfig cfg;
  cfg.events = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_conspiracy(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Conspiracy)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_HypothesisProfile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hypothesis_profile(static_cast<std::size_t>(state.range(0)), 7));
}
BENCHMARK(BM_HypothesisProfile)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
