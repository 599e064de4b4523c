#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace faaslab::agents {

// Minimal episodic environment surface the agents train and evaluate against.
// reset() starts a new episode and returns the first normalized observation;
// step() advances one decision and reports the raw (unscaled) reward.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;

  struct Step {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
  };

  virtual int observation_size() const = 0;
  virtual int action_count() const = 0;
  virtual std::vector<double> reset() = 0;
  virtual Step step(int action) = 0;
};

struct GaeConfig {
  double discount = 0.99;
  double lambda = 0.95;
};

// Generalized advantage estimation over a flat buffer that may span several
// episodes (done flags cut the recursion). values[t] is V(s_t) under the
// rollout policy; bootstrap_value is V of the state after the final step and
// is ignored when that step ends an episode. Outputs are raw: batch-level
// normalization is the caller's choice.
void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 const std::vector<unsigned char>& dones, double bootstrap_value,
                 const GaeConfig& cfg, std::vector<double>& advantages,
                 std::vector<double>& returns);

// Shifts and scales to mean 0, standard deviation 1 (no-op on constant input).
void normalize_in_place(std::vector<double>& values, double eps = 1e-8);

// One row of training telemetry, emitted after every parameter update.
struct TrainUpdateStats {
  long env_steps = 0;  // cumulative environment steps so far
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double epsilon = 0.0;  // exploration rate, when the agent has one
  double mean_episode_reward_raw = 0.0;
};
using TrainLog = std::function<void(const TrainUpdateStats&)>;

// Common face of the three learners: act for rollouts/evaluation, train for
// a step budget, save/load for checkpointing.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string kind() const = 0;
  virtual void begin_episode() = 0;  // clears recurrent state where present
  virtual int act(const std::vector<double>& observation, bool greedy) = 0;
  // Runs complete episodes until at least env_step_budget steps; returns the
  // number of steps actually taken.
  virtual long train(RolloutEnv& env, long env_step_budget, const TrainLog& log) = 0;
  virtual void save(const std::filesystem::path& path) const = 0;
  virtual void load(const std::filesystem::path& path) = 0;
};

}  // namespace faaslab::agents
