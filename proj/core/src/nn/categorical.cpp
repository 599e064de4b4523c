#include "faaslab/nn/categorical.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::nn {

Vec log_softmax(std::span<const double> logits) {
  contract(!logits.empty(), "log_softmax: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - m);
  const double lse = m + std::log(sum);
  Vec out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

Vec softmax(std::span<const double> logits) {
  Vec lp = log_softmax(logits);
  for (double& v : lp) v = std::exp(v);
  return lp;
}

int categorical_sample(std::span<const double> probs, Rng& rng) {
  contract(!probs.empty(), "categorical_sample: empty distribution");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double draw = u(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (draw < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;  // absorbs rounding shortfall in the CDF
}

int argmax(std::span<const double> v) {
  contract(!v.empty(), "argmax: empty vector");
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

double log_prob(std::span<const double> log_probs, int index) {
  contract(index >= 0 && index < static_cast<int>(log_probs.size()), "log_prob: index out of range");
  return log_probs[index];
}

double entropy(std::span<const double> probs, std::span<const double> log_probs) {
  contract(probs.size() == log_probs.size(), "entropy: size mismatch");
  double h = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) h -= probs[i] * log_probs[i];
  }
  return h;
}

}  // namespace faaslab::nn
