#pragma once

#include <span>

#include "faaslab/nn/dense.hpp"
#include "faaslab/nn/lstm.hpp"

namespace faaslab::agents {

// LSTM unrolled over one short sequence, keeping what BPTT needs.
struct LstmRun {
  std::vector<nn::LstmStepCache> steps;
  std::vector<nn::Vec> hidden;  // hidden[t] after consuming xs[t]
  nn::LstmState final_state;
};

LstmRun lstm_forward_seq(const nn::LstmCell& cell, std::span<const nn::Vec> xs,
                         nn::LstmState state);

// An MLP head applied independently at every step of a hidden sequence.
struct HeadRun {
  std::vector<nn::MlpCache> caches;
  std::vector<nn::Vec> out;
};

HeadRun head_forward_seq(const nn::Mlp& head, std::span<const nn::Vec> hidden);

// dout[t] is dL/dout[t]; accumulates head grads, returns dL/dhidden[t].
std::vector<nn::Vec> head_backward_seq(const nn::Mlp& head, const HeadRun& run,
                                       std::span<const nn::Vec> dout, nn::MlpGrads& grads);

// Shared across the policy-gradient agents: per-update loss decomposition.
struct SurrogateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  long samples = 0;
};

}  // namespace faaslab::agents
