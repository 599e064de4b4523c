#pragma once

#include <cstdint>
#include <span>

#include "faaslab/agents/nets.hpp"
#include "faaslab/agents/rollout.hpp"
#include "faaslab/nn/adam.hpp"

namespace faaslab::agents {

struct PpoConfig {
  std::vector<int> hidden{64, 64};

  double learning_rate = 3e-4;
  double clip_eps = 0.2;
  int epochs = 4;
  int minibatch_size = 64;  // steps per minibatch; 0 = the whole rollout
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;
  int steps_per_update = 200;
  double reward_scale = 0.01;
  GaeConfig gae;

  void validate() const;
};

// Memoryless actor-critic: two independent MLPs over the last observation.
struct PpoNet {
  nn::Mlp actor;   // obs -> action logits
  nn::Mlp critic;  // obs -> state value
};

struct PpoGrads {
  nn::MlpGrads actor;
  nn::MlpGrads critic;
};

PpoNet make_ppo_net(int obs_size, int action_count, const PpoConfig& cfg, Rng& rng);
PpoGrads make_ppo_grads(const PpoNet& net);
void zero_grads(const PpoNet& net, PpoGrads& grads);
nn::ParamSet ppo_param_set(PpoNet& net);
nn::ParamSet ppo_grad_set(const PpoNet& net, PpoGrads& grads);

// Step-level rollout storage; episode boundaries only matter to the
// advantage estimator, which runs before minibatching.
struct StepBatch {
  std::vector<nn::Vec> observations;
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return observations.size(); }
};

// Clipped-surrogate loss over the selected rows. Pure in the parameters.
SurrogateStats ppo_loss(const PpoNet& net, const StepBatch& batch, std::span<const int> rows,
                        const PpoConfig& cfg, PpoGrads* grads);

class PpoAgent final : public Agent {
 public:
  PpoAgent(int obs_size, int action_count, PpoConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "ppo"; }
  void begin_episode() override {}  // stateless between steps
  int act(const std::vector<double>& observation, bool greedy) override;
  long train(RolloutEnv& env, long env_step_budget, const TrainLog& log) override;
  void save(const std::filesystem::path& path) const override;
  void load(const std::filesystem::path& path) override;

  TrainUpdateStats update_once(RolloutEnv& env);

  PpoNet& net() { return net_; }
  const PpoConfig& config() const { return cfg_; }
  long env_steps() const { return env_steps_; }

 private:
  PpoConfig cfg_;
  PpoNet net_;
  PpoGrads grads_;
  nn::ParamSet params_, grad_views_;
  nn::AdamState adam_;
  Rng rng_;
  long env_steps_ = 0;
  bool episode_open_ = false;  // a truncated rollout resumes mid-episode
  nn::Vec pending_obs_;
  double open_episode_reward_ = 0.0;
};

}  // namespace faaslab::agents
