#pragma once

namespace faaslab::env {

// Weights of the per-window objective. A valid action earns
//   alpha * phi^2 - beta * (n - n_min)^2 + gamma_w * (c + m)
// and an invalid one earns r_min regardless of the window outcome.
struct RewardConfig {
  double alpha = 1.0;
  double beta = 0.1;
  double gamma_w = 0.2;
  double r_min = -100.0;
  int n_min = 1;
  int n_max = 24;

  // r_min must undercut the analytic minimum of the valid-action reward
  // (-beta * (n_max - n_min)^2), so the penalty is always the worst outcome.
  void validate() const;
};

double reward_fn(double phi, int replicas, double cpu_util, double mem_util, bool action_valid,
                 const RewardConfig& cfg);

}  // namespace faaslab::env
