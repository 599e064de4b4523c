#pragma once

#include <span>

#include "faaslab/common/rng.hpp"
#include "faaslab/nn/matrix.hpp"
#include "faaslab/nn/params.hpp"

namespace faaslab::nn {

enum class Activation { Identity, Tanh, Relu };

struct DenseLayer {
  Matrix w;  // out x in
  Vec b;     // out
  Activation act = Activation::Identity;
};

struct DenseGrads {
  Matrix dw;
  Vec db;
};

struct DenseCache {
  Vec x;  // input
  Vec z;  // pre-activation
};

DenseLayer make_dense(int in, int out, Activation act, double gain, Rng& rng);
DenseGrads make_dense_grads(const DenseLayer& layer);

Vec dense_forward(const DenseLayer& layer, std::span<const double> x, DenseCache* cache);

// Accumulates into grads; returns dL/dx.
Vec dense_backward(const DenseLayer& layer, const DenseCache& cache, std::span<const double> dy,
                   DenseGrads& grads);

// Stack of dense layers: hidden layers share one activation, the head is Identity.
struct Mlp {
  std::vector<DenseLayer> layers;
  int in_size() const { return layers.empty() ? 0 : layers.front().w.cols; }
  int out_size() const { return layers.empty() ? 0 : layers.back().w.rows; }
};

struct MlpGrads {
  std::vector<DenseGrads> layers;
};

struct MlpCache {
  std::vector<DenseCache> layers;
};

Mlp make_mlp(int in, const std::vector<int>& hidden, int out, Activation hidden_act,
             double hidden_gain, double head_gain, Rng& rng);
MlpGrads make_mlp_grads(const Mlp& mlp);

Vec mlp_forward(const Mlp& mlp, std::span<const double> x, MlpCache* cache);
Vec mlp_backward(const Mlp& mlp, const MlpCache& cache, std::span<const double> dy,
                 MlpGrads& grads);

void append_params(ParamSet& out, const std::string& prefix, Mlp& mlp);
void append_grads(ParamSet& out, const std::string& prefix, MlpGrads& grads);

}  // namespace faaslab::nn
