#include "faaslab/nn/matrix.hpp"

#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::nn {

void matvec(const Matrix& w, std::span<const double> x, std::span<double> y) {
  contract(static_cast<int>(x.size()) == w.cols && static_cast<int>(y.size()) == w.rows,
           "matvec: shape mismatch");
  const double* row = w.data.data();
  for (int r = 0; r < w.rows; ++r, row += w.cols) {
    double acc = 0.0;
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_bias(const Matrix& w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y) {
  contract(b.size() == y.size(), "matvec_bias: bias shape mismatch");
  matvec(w, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i];
}

void matvec_transposed_add(const Matrix& w, std::span<const double> dy, std::span<double> dx) {
  contract(static_cast<int>(dy.size()) == w.rows && static_cast<int>(dx.size()) == w.cols,
           "matvec_transposed_add: shape mismatch");
  const double* row = w.data.data();
  for (int r = 0; r < w.rows; ++r, row += w.cols) {
    const double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < w.cols; ++c) dx[c] += row[c] * g;
  }
}

void outer_add(Matrix& dw, std::span<const double> dy, std::span<const double> x) {
  contract(static_cast<int>(dy.size()) == dw.rows && static_cast<int>(x.size()) == dw.cols,
           "outer_add: shape mismatch");
  double* row = dw.data.data();
  for (int r = 0; r < dw.rows; ++r, row += dw.cols) {
    const double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < dw.cols; ++c) row[c] += g * x[c];
  }
}

void add_in_place(std::span<double> a, std::span<const double> b) {
  contract(a.size() == b.size(), "add_in_place: shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void scale_in_place(std::span<double> a, double s) {
  for (double& v : a) v *= s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  contract(a.size() == b.size(), "dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace faaslab::nn
