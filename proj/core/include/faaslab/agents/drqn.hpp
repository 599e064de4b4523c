#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>

#include "faaslab/agents/nets.hpp"
#include "faaslab/agents/rollout.hpp"
#include "faaslab/nn/adam.hpp"

namespace faaslab::agents {

struct DrqnConfig {
  int lstm_hidden = 256;
  std::vector<int> head_hidden{128, 128};

  double learning_rate = 3e-4;
  double discount = 0.99;
  int sequence_length = 8;  // replayed steps per sampled subsequence
  int burn_in = 2;          // leading steps that only warm up the hidden state
  long replay_capacity = 2000;  // stored episodes
  int min_replay_episodes = 8;
  int batch_size = 8;  // subsequences per gradient step
  int gradient_steps_per_episode = 4;
  long target_sync_every = 500;  // gradient steps between target refreshes
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  long epsilon_decay_steps = 1500;  // env steps to anneal over
  double huber_delta = 1.0;
  double max_grad_norm = 10.0;
  double reward_scale = 0.01;

  void validate() const;
};

// Recurrent Q-network: LSTM followed by a dense head over actions.
struct DrqnNet {
  nn::LstmCell lstm;
  nn::Mlp head;
};

struct DrqnGrads {
  nn::LstmGrads lstm;
  nn::MlpGrads head;
};

DrqnNet make_drqn_net(int obs_size, int action_count, const DrqnConfig& cfg, Rng& rng);
DrqnGrads make_drqn_grads(const DrqnNet& net);
void zero_grads(const DrqnNet& net, DrqnGrads& grads);
nn::ParamSet drqn_param_set(DrqnNet& net);
nn::ParamSet drqn_grad_set(const DrqnNet& net, DrqnGrads& grads);

// One episode as stored in replay: T transitions plus the T+1 observations
// around them. Rewards are stored pre-scaled.
struct StoredEpisode {
  std::vector<nn::Vec> observations;  // length T + 1
  std::vector<int> actions;           // length T
  std::vector<double> rewards;        // length T
  std::vector<unsigned char> done;    // length T

  long steps() const { return static_cast<long>(actions.size()); }
  void check() const;
};

// Ring buffer of complete episodes; push evicts the oldest past capacity.
class EpisodeReplay {
 public:
  explicit EpisodeReplay(long capacity);

  void push(StoredEpisode episode);
  long size() const { return static_cast<long>(episodes_.size()); }
  long capacity() const { return capacity_; }
  const StoredEpisode& at(long index) const { return episodes_[static_cast<std::size_t>(index)]; }

 private:
  long capacity_;
  std::deque<StoredEpisode> episodes_;
};

// A contiguous window of one stored episode, selected for replay.
struct SequenceSlice {
  const StoredEpisode* episode = nullptr;
  int start = 0;   // first transition index
  int length = 0;  // transitions replayed, burn-in included
};

// One-step TD targets from the frozen target net with Huber regression on the
// taken action. The first burn_in steps of each slice carry no loss and only
// warm up both hidden states. Returns the mean loss over learning steps.
double drqn_loss(const DrqnNet& online, const DrqnNet& target,
                 std::span<const SequenceSlice> batch, const DrqnConfig& cfg, DrqnGrads* grads);

class DrqnAgent final : public Agent {
 public:
  DrqnAgent(int obs_size, int action_count, DrqnConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "drqn"; }
  void begin_episode() override;
  // greedy bypasses exploration entirely; otherwise epsilon-greedy at the
  // current annealed rate.
  int act(const std::vector<double>& observation, bool greedy) override;
  long train(RolloutEnv& env, long env_step_budget, const TrainLog& log) override;
  void save(const std::filesystem::path& path) const override;
  void load(const std::filesystem::path& path) override;

  // One sampled gradient step. Empty when replay holds fewer than
  // min_replay_episodes episodes; otherwise the batch loss.
  std::optional<double> gradient_step();

  // Runs one epsilon-greedy episode, stores it, then takes the configured
  // number of gradient steps.
  TrainUpdateStats episode_step(RolloutEnv& env);

  double epsilon() const;  // current annealed exploration rate
  EpisodeReplay& replay() { return replay_; }
  DrqnNet& online() { return online_; }
  const DrqnNet& target() const { return target_; }
  long gradient_steps_taken() const { return grad_steps_; }
  long env_steps() const { return env_steps_; }
  const DrqnConfig& config() const { return cfg_; }

 private:
  void sync_target();

  DrqnConfig cfg_;
  DrqnNet online_, target_;
  DrqnGrads grads_;
  nn::ParamSet params_, grad_views_, target_params_;
  nn::AdamState adam_;
  Rng rng_;
  EpisodeReplay replay_;
  nn::LstmState act_state_;
  long env_steps_ = 0;
  long grad_steps_ = 0;
};

}  // namespace faaslab::agents
