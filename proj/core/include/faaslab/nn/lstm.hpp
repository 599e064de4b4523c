#pragma once

#include <span>

#include "faaslab/common/rng.hpp"
#include "faaslab/nn/matrix.hpp"
#include "faaslab/nn/params.hpp"

namespace faaslab::nn {

// Single-layer LSTM. Gate weights act on z = [x ; h_prev].
struct LstmCell {
  int input_size = 0;
  int hidden_size = 0;
  Matrix wf, wi, wg, wo;  // hidden x (input + hidden)
  Vec bf, bi, bg, bo;     // forget bias starts at 1.0 so early training retains state
};

struct LstmGrads {
  Matrix dwf, dwi, dwg, dwo;
  Vec dbf, dbi, dbg, dbo;
};

struct LstmState {
  Vec h, c;
};

// Everything lstm_bptt needs to replay one step backwards.
struct LstmStepCache {
  Vec z;       // [x ; h_prev]
  Vec f, i, g, o;
  Vec c_prev, c, tanh_c;
};

LstmCell make_lstm(int input_size, int hidden_size, Rng& rng);
LstmGrads make_lstm_grads(const LstmCell& cell);
LstmState lstm_initial_state(const LstmCell& cell);

// Advances state in place; cache may be null when no backward pass will follow.
void lstm_step(const LstmCell& cell, std::span<const double> x, LstmState& state,
               LstmStepCache* cache);

// Backpropagation through a contiguous step sequence. dh_seq[t] is the loss gradient
// w.r.t. h_t coming from downstream layers; recurrent contributions are added internally.
// Accumulates into grads. dx_seq, when given, is resized and receives dL/dx_t.
void lstm_bptt(const LstmCell& cell, std::span<const LstmStepCache> caches,
               std::span<const Vec> dh_seq, LstmGrads& grads, std::vector<Vec>* dx_seq = nullptr);

void append_params(ParamSet& out, const std::string& prefix, LstmCell& cell);
void append_grads(ParamSet& out, const std::string& prefix, LstmGrads& grads);

}  // namespace faaslab::nn
