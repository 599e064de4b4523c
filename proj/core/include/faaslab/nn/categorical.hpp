#pragma once

#include <span>

#include "faaslab/common/rng.hpp"
#include "faaslab/nn/matrix.hpp"

namespace faaslab::nn {

// Numerically stable: shifts by max(logits) before exponentiating.
Vec softmax(std::span<const double> logits);
Vec log_softmax(std::span<const double> logits);

// Inverse-CDF draw over the probability vector. probs must sum to ~1.
int categorical_sample(std::span<const double> probs, Rng& rng);

int argmax(std::span<const double> v);

// log p[index]; index must be in range.
double log_prob(std::span<const double> log_probs, int index);

// -sum p log p with 0 log 0 := 0. Maximum is log(k) at the uniform distribution.
double entropy(std::span<const double> probs, std::span<const double> log_probs);

}  // namespace faaslab::nn
