#pragma once

#include <cstdint>

#include "faaslab/nn/params.hpp"

namespace faaslab::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a flat view of all parameters. Moment buffers are
// laid out in registry order, so the same architecture must present the same
// registry between construction and every update call.
class AdamState {
 public:
  AdamState(std::size_t total_params, AdamConfig cfg);

  // params and grads must be registries of identical shapes in identical order.
  // Throws TrainingError if any gradient entry is non-finite; parameters are
  // untouched in that case.
  void update(const ParamSet& params, const ParamSet& grads);

  std::int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

 private:
  AdamConfig cfg_;
  Vec m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace faaslab::nn
