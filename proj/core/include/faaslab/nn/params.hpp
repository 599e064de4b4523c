#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "faaslab/nn/matrix.hpp"

namespace faaslab::nn {

// Named view over one parameter tensor. Biases are (n, 1).
// Registries list tensors in a stable order; optimizer state and checkpoints
// rely on that order being identical across runs of the same architecture.
struct ParamView {
  std::string name;
  int rows = 0;
  int cols = 0;
  double* values = nullptr;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

using ParamSet = std::vector<ParamView>;

inline ParamView view(const std::string& name, Matrix& m) {
  return ParamView{name, m.rows, m.cols, m.data.data()};
}

inline ParamView view(const std::string& name, Vec& v) {
  return ParamView{name, static_cast<int>(v.size()), 1, v.data()};
}

inline std::size_t total_size(const ParamSet& set) {
  std::size_t n = 0;
  for (const auto& p : set) n += p.size();
  return n;
}

inline void fill_zero(const ParamSet& set) {
  for (const auto& p : set) {
    for (std::size_t i = 0; i < p.size(); ++i) p.values[i] = 0.0;
  }
}

inline double global_norm(const ParamSet& set) {
  double sq = 0.0;
  for (const auto& p : set) {
    for (std::size_t i = 0; i < p.size(); ++i) sq += p.values[i] * p.values[i];
  }
  return std::sqrt(sq);
}

// Scales every tensor by min(1, max_norm / ||set||). Returns the pre-clip norm.
inline double clip_global_norm(const ParamSet& set, double max_norm) {
  const double norm = global_norm(set);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (const auto& p : set) {
      for (std::size_t i = 0; i < p.size(); ++i) p.values[i] *= s;
    }
  }
  return norm;
}

inline void copy_values(const ParamSet& from, const ParamSet& to) {
  for (std::size_t k = 0; k < from.size(); ++k) {
    for (std::size_t i = 0; i < from[k].size(); ++i) to[k].values[i] = from[k].values[i];
  }
}

}  // namespace faaslab::nn
