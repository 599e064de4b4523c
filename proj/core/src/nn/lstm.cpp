#include "faaslab/nn/lstm.hpp"

#include <cmath>

#include "faaslab/common/error.hpp"
#include "faaslab/nn/init.hpp"

namespace faaslab::nn {

static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmCell make_lstm(int input_size, int hidden_size, Rng& rng) {
  LstmCell cell;
  cell.input_size = input_size;
  cell.hidden_size = hidden_size;
  const int zdim = input_size + hidden_size;
  for (Matrix* w : {&cell.wf, &cell.wi, &cell.wg, &cell.wo}) {
    *w = Matrix(hidden_size, zdim);
    init_scaled_uniform_block(*w, 0, input_size, 1.0, rng);
    init_orthogonal_block(*w, input_size, zdim, 1.0, rng);
  }
  cell.bf.assign(hidden_size, 1.0);
  cell.bi.assign(hidden_size, 0.0);
  cell.bg.assign(hidden_size, 0.0);
  cell.bo.assign(hidden_size, 0.0);
  return cell;
}

LstmGrads make_lstm_grads(const LstmCell& cell) {
  LstmGrads g;
  const int zdim = cell.input_size + cell.hidden_size;
  g.dwf = Matrix(cell.hidden_size, zdim);
  g.dwi = Matrix(cell.hidden_size, zdim);
  g.dwg = Matrix(cell.hidden_size, zdim);
  g.dwo = Matrix(cell.hidden_size, zdim);
  g.dbf.assign(cell.hidden_size, 0.0);
  g.dbi.assign(cell.hidden_size, 0.0);
  g.dbg.assign(cell.hidden_size, 0.0);
  g.dbo.assign(cell.hidden_size, 0.0);
  return g;
}

LstmState lstm_initial_state(const LstmCell& cell) {
  return LstmState{Vec(cell.hidden_size, 0.0), Vec(cell.hidden_size, 0.0)};
}

void lstm_step(const LstmCell& cell, std::span<const double> x, LstmState& state,
               LstmStepCache* cache) {
  const int n = cell.hidden_size;
  contract(static_cast<int>(x.size()) == cell.input_size, "lstm_step: input size mismatch");
  contract(static_cast<int>(state.h.size()) == n && static_cast<int>(state.c.size()) == n,
           "lstm_step: state size mismatch");

  Vec z(cell.input_size + n);
  std::copy(x.begin(), x.end(), z.begin());
  std::copy(state.h.begin(), state.h.end(), z.begin() + cell.input_size);

  Vec f(n), i(n), g(n), o(n);
  matvec_bias(cell.wf, z, cell.bf, f);
  matvec_bias(cell.wi, z, cell.bi, i);
  matvec_bias(cell.wg, z, cell.bg, g);
  matvec_bias(cell.wo, z, cell.bo, o);
  for (int k = 0; k < n; ++k) {
    f[k] = sigmoid(f[k]);
    i[k] = sigmoid(i[k]);
    g[k] = std::tanh(g[k]);
    o[k] = sigmoid(o[k]);
  }

  Vec c_prev = state.c;
  Vec tanh_c(n);
  for (int k = 0; k < n; ++k) {
    state.c[k] = f[k] * c_prev[k] + i[k] * g[k];
    tanh_c[k] = std::tanh(state.c[k]);
    state.h[k] = o[k] * tanh_c[k];
  }

  if (cache != nullptr) {
    cache->z = std::move(z);
    cache->f = std::move(f);
    cache->i = std::move(i);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->c_prev = std::move(c_prev);
    cache->c = state.c;
    cache->tanh_c = std::move(tanh_c);
  }
}

void lstm_bptt(const LstmCell& cell, std::span<const LstmStepCache> caches,
               std::span<const Vec> dh_seq, LstmGrads& grads, std::vector<Vec>* dx_seq) {
  contract(caches.size() == dh_seq.size(), "lstm_bptt: cache/gradient length mismatch");
  const int n = cell.hidden_size;
  const int zdim = cell.input_size + n;
  for (const auto& c : caches) {
    contract(static_cast<int>(c.z.size()) == zdim && static_cast<int>(c.f.size()) == n,
             "lstm_bptt: cache shape does not match cell");
  }
  if (dx_seq != nullptr) dx_seq->assign(caches.size(), Vec(cell.input_size, 0.0));

  Vec dh_rec(n, 0.0);
  Vec dc(n, 0.0);
  Vec daf(n), dai(n), dag(n), dao(n), dz(zdim);

  for (std::size_t t = caches.size(); t-- > 0;) {
    const LstmStepCache& cc = caches[t];
    contract(static_cast<int>(dh_seq[t].size()) == n, "lstm_bptt: dh size mismatch");

    for (int k = 0; k < n; ++k) {
      const double dh = dh_seq[t][k] + dh_rec[k];
      const double dtanh = 1.0 - cc.tanh_c[k] * cc.tanh_c[k];
      dc[k] += dh * cc.o[k] * dtanh;
      dao[k] = dh * cc.tanh_c[k] * cc.o[k] * (1.0 - cc.o[k]);
      daf[k] = dc[k] * cc.c_prev[k] * cc.f[k] * (1.0 - cc.f[k]);
      dai[k] = dc[k] * cc.g[k] * cc.i[k] * (1.0 - cc.i[k]);
      dag[k] = dc[k] * cc.i[k] * (1.0 - cc.g[k] * cc.g[k]);
    }

    outer_add(grads.dwf, daf, cc.z);
    outer_add(grads.dwi, dai, cc.z);
    outer_add(grads.dwg, dag, cc.z);
    outer_add(grads.dwo, dao, cc.z);
    add_in_place(grads.dbf, daf);
    add_in_place(grads.dbi, dai);
    add_in_place(grads.dbg, dag);
    add_in_place(grads.dbo, dao);

    std::fill(dz.begin(), dz.end(), 0.0);
    matvec_transposed_add(cell.wf, daf, dz);
    matvec_transposed_add(cell.wi, dai, dz);
    matvec_transposed_add(cell.wg, dag, dz);
    matvec_transposed_add(cell.wo, dao, dz);

    if (dx_seq != nullptr) {
      std::copy(dz.begin(), dz.begin() + cell.input_size, (*dx_seq)[t].begin());
    }
    std::copy(dz.begin() + cell.input_size, dz.end(), dh_rec.begin());
    for (int k = 0; k < n; ++k) dc[k] *= cc.f[k];  // carry into step t-1
  }
}

void append_params(ParamSet& out, const std::string& prefix, LstmCell& cell) {
  out.push_back(view(prefix + "/wf", cell.wf));
  out.push_back(view(prefix + "/wi", cell.wi));
  out.push_back(view(prefix + "/wg", cell.wg));
  out.push_back(view(prefix + "/wo", cell.wo));
  out.push_back(view(prefix + "/bf", cell.bf));
  out.push_back(view(prefix + "/bi", cell.bi));
  out.push_back(view(prefix + "/bg", cell.bg));
  out.push_back(view(prefix + "/bo", cell.bo));
}

void append_grads(ParamSet& out, const std::string& prefix, LstmGrads& grads) {
  out.push_back(view(prefix + "/wf", grads.dwf));
  out.push_back(view(prefix + "/wi", grads.dwi));
  out.push_back(view(prefix + "/wg", grads.dwg));
  out.push_back(view(prefix + "/wo", grads.dwo));
  out.push_back(view(prefix + "/bf", grads.dbf));
  out.push_back(view(prefix + "/bi", grads.dbi));
  out.push_back(view(prefix + "/bg", grads.dbg));
  out.push_back(view(prefix + "/bo", grads.dbo));
}

}  // namespace faaslab::nn
