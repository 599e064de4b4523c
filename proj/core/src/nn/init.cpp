#include "faaslab/nn/init.hpp"

#include <cmath>
#include <vector>

#include "faaslab/common/error.hpp"

namespace faaslab::nn {

void init_scaled_uniform(Matrix& m, double gain, Rng& rng) {
  init_scaled_uniform_block(m, 0, m.cols, gain, rng);
}

void init_scaled_uniform_block(Matrix& m, int col_begin, int col_end, double gain, Rng& rng) {
  contract(0 <= col_begin && col_begin < col_end && col_end <= m.cols,
           "init_scaled_uniform_block: bad column range");
  const int fan_in = col_end - col_begin;
  const int fan_out = m.rows;
  const double limit = gain * std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = col_begin; c < col_end; ++c) m.at(r, c) = u(rng);
  }
}

// Modified Gram-Schmidt over the shorter dimension of the block.
static void orthonormalize(std::vector<Vec>& basis, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t dim = basis.empty() ? 0 : basis[0].size();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Vec& v = basis[k];
    double norm = 0.0;
    // Redraw on (numerically) dependent vectors; overwhelmingly a single pass.
    for (int attempt = 0; attempt < 16; ++attempt) {
      if (attempt > 0 || v.empty()) {
        v.assign(dim, 0.0);
        for (double& x : v) x = g(rng);
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double proj = dot(v, basis[j]);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * basis[j][i];
      }
      norm = std::sqrt(dot(v, v));
      if (norm > 1e-8) break;
    }
    for (double& x : v) x /= norm;
  }
}

void init_orthogonal_block(Matrix& m, int col_begin, int col_end, double gain, Rng& rng) {
  contract(0 <= col_begin && col_begin < col_end && col_end <= m.cols,
           "init_orthogonal_block: bad column range");
  const int bcols = col_end - col_begin;
  const int rows = m.rows;
  std::normal_distribution<double> g(0.0, 1.0);

  const bool by_rows = rows <= bcols;
  const int vecs = by_rows ? rows : bcols;
  const int dim = by_rows ? bcols : rows;
  std::vector<Vec> basis(vecs, Vec(dim));
  for (auto& v : basis) {
    for (double& x : v) x = g(rng);
  }
  orthonormalize(basis, rng);

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < bcols; ++c) {
      const double val = by_rows ? basis[r][c] : basis[c][r];
      m.at(r, col_begin + c) = gain * val;
    }
  }
}

void init_orthogonal(Matrix& m, double gain, Rng& rng) {
  init_orthogonal_block(m, 0, m.cols, gain, rng);
}

}  // namespace faaslab::nn
