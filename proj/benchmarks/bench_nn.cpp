// Neural-core costs at the lab's production sizes: observation 6, five
// actions, 256 LSTM cells, 64x64 heads. The loss benchmarks time one full
// forward+backward over realistic batch shapes, the unit the training loop
// repeats.

#include <benchmark/benchmark.h>

#include <vector>

#include "faaslab/agents/ppo.hpp"
#include "faaslab/agents/rppo.hpp"
#include "faaslab/common/rng.hpp"
#include "faaslab/nn/dense.hpp"
#include "faaslab/nn/lstm.hpp"

using namespace faaslab;
using namespace faaslab::agents;

namespace {

std::vector<nn::Vec> random_obs(int count, int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<nn::Vec> out(count, nn::Vec(dim, 0.0));
  for (auto& v : out) {
    for (auto& x : v) x = u(rng);
  }
  return out;
}

}  // namespace

static void BM_MlpForward(benchmark::State& state) {
  Rng rng(1);
  nn::Mlp mlp = nn::make_mlp(6, {64, 64}, 5, nn::Activation::Tanh, 1.0, 0.01, rng);
  const nn::Vec x = random_obs(1, 6, rng)[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::mlp_forward(mlp, x, nullptr));
  }
}
BENCHMARK(BM_MlpForward);

static void BM_LstmStep(benchmark::State& state) {
  Rng rng(2);
  nn::LstmCell cell = nn::make_lstm(6, 256, rng);
  nn::LstmState st = nn::lstm_initial_state(cell);
  const nn::Vec x = random_obs(1, 6, rng)[0];
  for (auto _ : state) {
    nn::lstm_step(cell, x, st, nullptr);
    benchmark::DoNotOptimize(st.h.data());
  }
}
BENCHMARK(BM_LstmStep);

static void BM_LstmBptt(benchmark::State& state) {
  const int len = 10;
  Rng rng(3);
  nn::LstmCell cell = nn::make_lstm(6, 256, rng);
  nn::LstmGrads grads = nn::make_lstm_grads(cell);
  const std::vector<nn::Vec> xs = random_obs(len, 6, rng);
  const std::vector<nn::Vec> dh(len, nn::Vec(256, 0.01));
  for (auto _ : state) {
    nn::LstmState st = nn::lstm_initial_state(cell);
    std::vector<nn::LstmStepCache> caches(len);
    for (int t = 0; t < len; ++t) nn::lstm_step(cell, xs[t], st, &caches[t]);
    nn::lstm_bptt(cell, caches, dh, grads);
    benchmark::DoNotOptimize(grads.dwf.data.data());
  }
  state.SetItemsProcessed(state.iterations() * len);
}
BENCHMARK(BM_LstmBptt);

static void BM_RppoLossGrad(benchmark::State& state) {
  const int episodes = static_cast<int>(state.range(0));
  Rng rng(4);
  RppoConfig cfg;
  RppoNet net = make_rppo_net(6, 5, cfg, rng);
  RppoGrads grads = make_rppo_grads(net);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<EpisodeSeq> batch(episodes);
  for (EpisodeSeq& ep : batch) {
    ep.observations = random_obs(10, 6, rng);
    for (int t = 0; t < 10; ++t) {
      ep.actions.push_back(static_cast<int>(rng() % 5));
      ep.old_log_probs.push_back(-1.6 + 0.1 * u(rng));
      ep.advantages.push_back(u(rng));
      ep.returns.push_back(u(rng));
    }
  }
  for (auto _ : state) {
    zero_grads(net, grads);
    benchmark::DoNotOptimize(rppo_loss(net, batch, cfg, &grads));
  }
  state.SetItemsProcessed(state.iterations() * episodes * 10);
}
BENCHMARK(BM_RppoLossGrad)->Arg(1)->Arg(5)->Arg(20);

static void BM_PpoLossGrad(benchmark::State& state) {
  const int steps = 200;
  Rng rng(5);
  PpoConfig cfg;
  PpoNet net = make_ppo_net(6, 5, cfg, rng);
  PpoGrads grads = make_ppo_grads(net);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StepBatch batch;
  batch.observations = random_obs(steps, 6, rng);
  std::vector<int> rows(steps);
  for (int t = 0; t < steps; ++t) {
    batch.actions.push_back(static_cast<int>(rng() % 5));
    batch.old_log_probs.push_back(-1.6 + 0.1 * u(rng));
    batch.advantages.push_back(u(rng));
    batch.returns.push_back(u(rng));
    rows[t] = t;
  }
  for (auto _ : state) {
    zero_grads(net, grads);
    benchmark::DoNotOptimize(ppo_loss(net, batch, rows, cfg, &grads));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_PpoLossGrad);

BENCHMARK_MAIN();
