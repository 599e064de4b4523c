#include "faaslab/agents/rollout.hpp"

#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::agents {

void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 const std::vector<unsigned char>& dones, double bootstrap_value,
                 const GaeConfig& cfg, std::vector<double>& advantages,
                 std::vector<double>& returns) {
  const std::size_t n = rewards.size();
  contract(values.size() == n && dones.size() == n, "gae buffers must have equal length");
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double next_value = bootstrap_value;
  double next_advantage = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + cfg.discount * next_value * live - values[i];
    next_advantage = delta + cfg.discount * cfg.lambda * live * next_advantage;
    advantages[i] = next_advantage;
    returns[i] = next_advantage + values[i];
    next_value = values[i];
  }
}

void normalize_in_place(std::vector<double>& values, double eps) {
  if (values.size() < 2) return;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double scale = 1.0 / (std::sqrt(var) + eps);
  for (double& v : values) v = (v - mean) * scale;
}

}  // namespace faaslab::agents
