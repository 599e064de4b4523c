#pragma once

#include <span>
#include <vector>

namespace faaslab::nn {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. All shapes are fixed at construction.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return data.size(); }
};

// y = W x
void matvec(const Matrix& w, std::span<const double> x, std::span<double> y);

// y = W x + b
void matvec_bias(const Matrix& w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y);

// dx += W^T dy
void matvec_transposed_add(const Matrix& w, std::span<const double> dy, std::span<double> dx);

// dw += dy x^T
void outer_add(Matrix& dw, std::span<const double> dy, std::span<const double> x);

void add_in_place(std::span<double> a, std::span<const double> b);
void scale_in_place(std::span<double> a, double s);
double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

}  // namespace faaslab::nn
