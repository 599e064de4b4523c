#include "faaslab/env/reward.hpp"

#include "faaslab/common/error.hpp"

namespace faaslab::env {

void RewardConfig::validate() const {
  require(alpha >= 0.0, "reward: alpha must be >= 0");
  require(beta >= 0.0, "reward: beta must be >= 0");
  require(gamma_w >= 0.0, "reward: gamma_w must be >= 0");
  require(n_min >= 1, "reward: n_min must be >= 1");
  require(n_max >= n_min, "reward: n_max must be >= n_min");
  const double span = static_cast<double>(n_max - n_min);
  const double worst_valid = -beta * span * span;
  require(r_min < worst_valid,
          "reward: r_min must be below the worst valid-action reward -beta*(n_max-n_min)^2");
}

double reward_fn(double phi, int replicas, double cpu_util, double mem_util, bool action_valid,
                 const RewardConfig& cfg) {
  if (!action_valid) return cfg.r_min;
  const double dn = static_cast<double>(replicas - cfg.n_min);
  return cfg.alpha * (phi * phi) - cfg.beta * (dn * dn) + cfg.gamma_w * (cpu_util + mem_util);
}

}  // namespace faaslab::env
