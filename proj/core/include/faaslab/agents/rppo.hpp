#pragma once

#include <cstdint>
#include <span>

#include "faaslab/agents/nets.hpp"
#include "faaslab/agents/rollout.hpp"
#include "faaslab/nn/adam.hpp"

namespace faaslab::agents {

struct RppoConfig {
  int lstm_hidden = 256;
  std::vector<int> head_hidden{64, 64};
  bool shared_lstm = false;  // one memory for both heads instead of two towers

  double learning_rate = 3e-4;
  double clip_eps = 0.2;
  int epochs = 4;
  int minibatch_episodes = 0;  // 0 = all collected episodes form one batch
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;
  int episodes_per_update = 20;
  double reward_scale = 0.01;  // rewards are scaled before advantage estimation
  GaeConfig gae;

  void validate() const;
};

// Recurrent actor-critic. Split mode runs two towers; shared mode runs one
// LSTM whose hidden state feeds both heads.
struct RppoNet {
  bool shared = false;
  nn::LstmCell actor_lstm;
  nn::LstmCell critic_lstm;  // empty in shared mode
  nn::Mlp actor_head;        // hidden -> action logits
  nn::Mlp critic_head;       // hidden -> state value
};

struct RppoGrads {
  nn::LstmGrads actor_lstm;
  nn::LstmGrads critic_lstm;
  nn::MlpGrads actor_head;
  nn::MlpGrads critic_head;
};

RppoNet make_rppo_net(int obs_size, int action_count, const RppoConfig& cfg, Rng& rng);
RppoGrads make_rppo_grads(const RppoNet& net);
void zero_grads(const RppoNet& net, RppoGrads& grads);
nn::ParamSet rppo_param_set(RppoNet& net);
nn::ParamSet rppo_grad_set(const RppoNet& net, RppoGrads& grads);

// One complete episode prepared for a sequence replay from a zero initial
// recurrent state (episodes begin at reset, so the stored state is the
// initial one). advantages arrive already normalized over the update batch.
struct EpisodeSeq {
  std::vector<nn::Vec> observations;
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Clipped-surrogate loss with entropy bonus and value regression over
// whole-episode sequences. Accumulates analytic gradients when grads is
// non-null. Pure in the parameters: never mutates the net.
SurrogateStats rppo_loss(const RppoNet& net, std::span<const EpisodeSeq> episodes,
                         const RppoConfig& cfg, RppoGrads* grads);

class RppoAgent final : public Agent {
 public:
  RppoAgent(int obs_size, int action_count, RppoConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "rppo"; }
  void begin_episode() override;
  int act(const std::vector<double>& observation, bool greedy) override;
  long train(RolloutEnv& env, long env_step_budget, const TrainLog& log) override;
  void save(const std::filesystem::path& path) const override;
  void load(const std::filesystem::path& path) override;

  // One collect + optimize cycle; exposed for tests and fine-grained drivers.
  TrainUpdateStats update_once(RolloutEnv& env);

  RppoNet& net() { return net_; }
  const RppoConfig& config() const { return cfg_; }
  long env_steps() const { return env_steps_; }

 private:
  struct PolicyStep {
    int action = 0;
    double log_prob = 0.0;
    double value = 0.0;
  };
  PolicyStep policy_step(const nn::Vec& obs, bool greedy);

  RppoConfig cfg_;
  RppoNet net_;
  RppoGrads grads_;
  nn::ParamSet params_, grad_views_;
  nn::AdamState adam_;
  Rng rng_;
  nn::LstmState actor_state_, critic_state_;
  long env_steps_ = 0;
};

}  // namespace faaslab::agents
