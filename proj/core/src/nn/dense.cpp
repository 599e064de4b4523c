#include "faaslab/nn/dense.hpp"

#include <cmath>

#include "faaslab/common/error.hpp"
#include "faaslab/nn/init.hpp"

namespace faaslab::nn {

static double activate(Activation act, double z) {
  switch (act) {
    case Activation::Identity: return z;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Relu: return z > 0.0 ? z : 0.0;
  }
  return z;
}

static double activate_grad(Activation act, double z) {
  switch (act) {
    case Activation::Identity: return 1.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

DenseLayer make_dense(int in, int out, Activation act, double gain, Rng& rng) {
  DenseLayer layer;
  layer.w = Matrix(out, in);
  layer.b.assign(out, 0.0);
  layer.act = act;
  init_scaled_uniform(layer.w, gain, rng);
  return layer;
}

DenseGrads make_dense_grads(const DenseLayer& layer) {
  DenseGrads g;
  g.dw = Matrix(layer.w.rows, layer.w.cols);
  g.db.assign(layer.b.size(), 0.0);
  return g;
}

Vec dense_forward(const DenseLayer& layer, std::span<const double> x, DenseCache* cache) {
  contract(static_cast<int>(x.size()) == layer.w.cols, "dense_forward: input size mismatch");
  Vec z(layer.w.rows);
  matvec_bias(layer.w, x, layer.b, z);
  Vec y(layer.w.rows);
  for (int i = 0; i < layer.w.rows; ++i) y[i] = activate(layer.act, z[i]);
  if (cache != nullptr) {
    cache->x.assign(x.begin(), x.end());
    cache->z = std::move(z);
  }
  return y;
}

Vec dense_backward(const DenseLayer& layer, const DenseCache& cache, std::span<const double> dy,
                   DenseGrads& grads) {
  contract(static_cast<int>(dy.size()) == layer.w.rows, "dense_backward: dy size mismatch");
  contract(cache.z.size() == static_cast<std::size_t>(layer.w.rows) &&
               cache.x.size() == static_cast<std::size_t>(layer.w.cols),
           "dense_backward: cache does not match layer");
  Vec dz(layer.w.rows);
  for (int i = 0; i < layer.w.rows; ++i) dz[i] = dy[i] * activate_grad(layer.act, cache.z[i]);
  outer_add(grads.dw, dz, cache.x);
  add_in_place(grads.db, dz);
  Vec dx(layer.w.cols, 0.0);
  matvec_transposed_add(layer.w, dz, dx);
  return dx;
}

Mlp make_mlp(int in, const std::vector<int>& hidden, int out, Activation hidden_act,
             double hidden_gain, double head_gain, Rng& rng) {
  Mlp mlp;
  int cur = in;
  for (int h : hidden) {
    mlp.layers.push_back(make_dense(cur, h, hidden_act, hidden_gain, rng));
    cur = h;
  }
  mlp.layers.push_back(make_dense(cur, out, Activation::Identity, head_gain, rng));
  return mlp;
}

MlpGrads make_mlp_grads(const Mlp& mlp) {
  MlpGrads g;
  for (const auto& layer : mlp.layers) g.layers.push_back(make_dense_grads(layer));
  return g;
}

Vec mlp_forward(const Mlp& mlp, std::span<const double> x, MlpCache* cache) {
  if (cache != nullptr) cache->layers.resize(mlp.layers.size());
  Vec cur(x.begin(), x.end());
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    cur = dense_forward(mlp.layers[i], cur, cache != nullptr ? &cache->layers[i] : nullptr);
  }
  return cur;
}

Vec mlp_backward(const Mlp& mlp, const MlpCache& cache, std::span<const double> dy,
                 MlpGrads& grads) {
  contract(cache.layers.size() == mlp.layers.size(), "mlp_backward: cache depth mismatch");
  Vec cur(dy.begin(), dy.end());
  for (std::size_t i = mlp.layers.size(); i-- > 0;) {
    cur = dense_backward(mlp.layers[i], cache.layers[i], cur, grads.layers[i]);
  }
  return cur;
}

void append_params(ParamSet& out, const std::string& prefix, Mlp& mlp) {
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const std::string base = prefix + "/dense" + std::to_string(i);
    out.push_back(view(base + "/w", mlp.layers[i].w));
    out.push_back(view(base + "/b", mlp.layers[i].b));
  }
}

void append_grads(ParamSet& out, const std::string& prefix, MlpGrads& grads) {
  for (std::size_t i = 0; i < grads.layers.size(); ++i) {
    const std::string base = prefix + "/dense" + std::to_string(i);
    out.push_back(view(base + "/w", grads.layers[i].dw));
    out.push_back(view(base + "/b", grads.layers[i].db));
  }
}

}  // namespace faaslab::nn
