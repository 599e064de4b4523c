#pragma once

#include <functional>
#include <string>
#include <vector>

#include "faaslab/nn/params.hpp"

namespace faaslab::nn {

struct GradCheckBlock {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double max_rel_err = 0.0;
  bool ok(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of analytic gradients. loss_fn must recompute the loss
// from the current parameter values and be free of other state. analytic holds a
// snapshot of dL/dtheta aligned with params. Parameters are restored exactly.
// Relative error per entry: |a - n| / max(|a| + |n|, floor).
GradCheckReport grad_check(const std::function<double()>& loss_fn, const ParamSet& params,
                           const std::vector<Vec>& analytic, double step = 1e-5,
                           double denom_floor = 1e-8);

// Convenience: copies a grad registry into a snapshot aligned with it.
std::vector<Vec> snapshot(const ParamSet& grads);

}  // namespace faaslab::nn
