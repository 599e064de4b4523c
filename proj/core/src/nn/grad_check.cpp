#include "faaslab/nn/grad_check.hpp"

#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::nn {

std::vector<Vec> snapshot(const ParamSet& grads) {
  std::vector<Vec> out;
  out.reserve(grads.size());
  for (const auto& g : grads) out.emplace_back(g.values, g.values + g.size());
  return out;
}

GradCheckReport grad_check(const std::function<double()>& loss_fn, const ParamSet& params,
                           const std::vector<Vec>& analytic, double step, double denom_floor) {
  contract(params.size() == analytic.size(), "grad_check: snapshot length mismatch");
  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    contract(analytic[k].size() == params[k].size(), "grad_check: snapshot shape mismatch");
    GradCheckBlock block{params[k].name, 0.0};
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      double& p = params[k].values[i];
      const double saved = p;
      p = saved + step;
      const double up = loss_fn();
      p = saved - step;
      const double down = loss_fn();
      p = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[k][i];
      const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), denom_floor);
      if (rel > block.max_rel_err) block.max_rel_err = rel;
    }
    if (block.max_rel_err > report.max_rel_err) report.max_rel_err = block.max_rel_err;
    report.blocks.push_back(std::move(block));
  }
  return report;
}

}  // namespace faaslab::nn
