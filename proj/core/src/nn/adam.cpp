#include "faaslab/nn/adam.hpp"

#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::nn {

AdamState::AdamState(std::size_t total_params, AdamConfig cfg)
    : cfg_(cfg), m_(total_params, 0.0), v_(total_params, 0.0) {}

void AdamState::update(const ParamSet& params, const ParamSet& grads) {
  contract(params.size() == grads.size(), "adam: registry length mismatch");
  std::size_t total = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    contract(params[k].size() == grads[k].size(), "adam: tensor shape mismatch at " + params[k].name);
    total += params[k].size();
  }
  contract(total == m_.size(), "adam: registry does not match state size");

  for (const auto& g : grads) {
    if (!all_finite(std::span<const double>(g.values, g.size()))) {
      throw TrainingError("adam: non-finite gradient in " + g.name);
    }
  }

  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t off = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* p = params[k].values;
    const double* g = grads[k].values;
    const std::size_t n = params[k].size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = off + i;
      m_[j] = b1 * m_[j] + (1.0 - b1) * g[i];
      v_[j] = b2 * v_[j] + (1.0 - b2) * g[i] * g[i];
      const double mhat = m_[j] / bc1;
      const double vhat = v_[j] / bc2;
      p[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    off += n;
  }
}

}  // namespace faaslab::nn
