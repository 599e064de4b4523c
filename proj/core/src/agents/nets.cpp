#include "faaslab/agents/nets.hpp"

#include "faaslab/common/error.hpp"

namespace faaslab::agents {

LstmRun lstm_forward_seq(const nn::LstmCell& cell, std::span<const nn::Vec> xs,
                         nn::LstmState state) {
  LstmRun run;
  run.steps.resize(xs.size());
  run.hidden.resize(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    nn::lstm_step(cell, xs[t], state, &run.steps[t]);
    run.hidden[t] = state.h;
  }
  run.final_state = std::move(state);
  return run;
}

HeadRun head_forward_seq(const nn::Mlp& head, std::span<const nn::Vec> hidden) {
  HeadRun run;
  run.caches.resize(hidden.size());
  run.out.resize(hidden.size());
  for (std::size_t t = 0; t < hidden.size(); ++t) {
    run.out[t] = nn::mlp_forward(head, hidden[t], &run.caches[t]);
  }
  return run;
}

std::vector<nn::Vec> head_backward_seq(const nn::Mlp& head, const HeadRun& run,
                                       std::span<const nn::Vec> dout, nn::MlpGrads& grads) {
  contract(dout.size() == run.caches.size(), "head backward needs one dout per step");
  std::vector<nn::Vec> dh(dout.size());
  for (std::size_t t = 0; t < dout.size(); ++t) {
    dh[t] = nn::mlp_backward(head, run.caches[t], dout[t], grads);
  }
  return dh;
}

}  // namespace faaslab::agents
