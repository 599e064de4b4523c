// Hot paths of the cluster simulator and its episodic wrapper. Arrival
// volume is the main cost driver, so the window benchmark sweeps it.

#include <benchmark/benchmark.h>

#include <vector>

#include "faaslab/baselines/hpa.hpp"
#include "faaslab/common/rng.hpp"
#include "faaslab/env/scaling_env.hpp"
#include "faaslab/sim/simulator.hpp"
#include "faaslab/workload/arrivals.hpp"
#include "faaslab/workload/trace.hpp"

using namespace faaslab;

static void BM_WindowAdvance(benchmark::State& state) {
  const long count = state.range(0);
  sim::SimConfig cfg;
  sim::FaasSimulator sim(cfg);
  sim.apply_scaling(7);  // a mid-size pool keeps queueing honest
  workload::SizeMix mix;
  Rng rng(1);
  for (auto _ : state) {
    const workload::ArrivalPlan plan =
        workload::sample_arrivals(count, sim.now(), cfg.window_seconds, mix, rng);
    benchmark::DoNotOptimize(sim.advance_window(workload::make_requests(plan, cfg)));
  }
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_WindowAdvance)->Arg(0)->Arg(8)->Arg(32)->Arg(128);

static void BM_EnvEpisode(benchmark::State& state) {
  env::EnvConfig cfg;
  const workload::Trace trace = workload::synth_trace(workload::TracePattern::DiurnalSine, 400, 24, 7);
  env::ScalingEnv env(cfg, trace);
  Rng rng(2);
  unsigned long long episode = 0;
  for (auto _ : state) {
    env.reset(episode++, static_cast<long>(episode % 300));
    double reward = 0.0;
    for (int w = 0; w < cfg.episode_windows; ++w) {
      reward += env.step(static_cast<int>(rng() % 5)).reward;
    }
    benchmark::DoNotOptimize(reward);
  }
  state.SetItemsProcessed(state.iterations() * cfg.episode_windows);
}
BENCHMARK(BM_EnvEpisode);

static void BM_HpaWindow(benchmark::State& state) {
  sim::SimConfig cfg;
  sim::FaasSimulator sim(cfg);
  baselines::HpaController ctrl{baselines::HpaConfig{}};
  workload::SizeMix mix;
  Rng rng(3);
  for (auto _ : state) {
    const workload::ArrivalPlan plan =
        workload::sample_arrivals(32, sim.now(), cfg.window_seconds, mix, rng);
    benchmark::DoNotOptimize(
        baselines::hpa_window(sim, ctrl, workload::make_requests(plan, cfg)));
  }
}
BENCHMARK(BM_HpaWindow);

BENCHMARK_MAIN();
