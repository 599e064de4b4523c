#include "faaslab/baselines/hpa.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::baselines {

void HpaConfig::validate(double util_cap, double window_seconds) const {
  require(target_cpu > 0.0 && target_cpu <= util_cap,
          "target_cpu must lie in (0, util_cap]");
  require(query_period_seconds > 0.0 && query_period_seconds <= window_seconds,
          "query_period must lie in (0, window_seconds]");
  require(downscale_stabilization_seconds >= 0.0,
          "downscale_stabilization must be non-negative");
  require(min_replicas >= 1 && max_replicas >= min_replicas,
          "replica bounds must satisfy 1 <= min <= max");
  require(tolerance >= 0.0 && tolerance < 1.0, "tolerance must lie in [0, 1)");
}

int hpa_desired(int current_replicas, double measured_cpu, const HpaConfig& cfg) {
  contract(measured_cpu >= 0.0, "measured cpu must be non-negative");
  contract(current_replicas >= cfg.min_replicas && current_replicas <= cfg.max_replicas,
           "current replicas outside the configured bounds");
  const double ratio = measured_cpu / cfg.target_cpu;
  if (std::abs(ratio - 1.0) <= cfg.tolerance) return current_replicas;
  const double desired = std::ceil(static_cast<double>(current_replicas) * ratio);
  return std::clamp(static_cast<int>(desired), cfg.min_replicas, cfg.max_replicas);
}

HpaController::HpaController(HpaConfig cfg) : cfg_(cfg) {}

int HpaController::observe(double time, double measured_cpu, int current_replicas) {
  contract(!seen_any_ || time >= last_time_, "samples must arrive in time order");
  last_time_ = time;
  if (!seen_any_) {
    // Pre-history stand-in: before the first sample the controller would
    // have been recommending the running size.
    recommendations_.emplace_back(time, current_replicas);
    seen_any_ = true;
  }

  const int desired = hpa_desired(current_replicas, measured_cpu, cfg_);
  recommendations_.emplace_back(time, desired);
  const double horizon = time - cfg_.downscale_stabilization_seconds;
  while (!recommendations_.empty() && recommendations_.front().first < horizon) {
    recommendations_.pop_front();
  }

  if (desired > current_replicas) return desired - current_replicas;
  if (desired < current_replicas) {
    // Scale down only as far as the most conservative recent recommendation.
    int hold = desired;
    for (const auto& [_, d] : recommendations_) hold = std::max(hold, d);
    hold = std::min(hold, current_replicas);
    return hold - current_replicas;
  }
  return 0;
}

sim::WindowMetrics hpa_window(sim::FaasSimulator& s, HpaController& ctrl,
                              std::vector<sim::Request> arrivals) {
  const sim::SimConfig& sc = s.config();
  contract(ctrl.config().query_period_seconds == sc.probe_period_seconds,
           "controller query period must match the simulator probe period");
  contract(ctrl.config().min_replicas == sc.min_replicas &&
               ctrl.config().max_replicas == sc.max_replicas,
           "controller and simulator replica bounds must agree");
  return s.advance_window(std::move(arrivals), [&](const sim::ProbeSample& sample) {
    return ctrl.observe(sample.time, sample.cpu_util, sample.replicas);
  });
}

}  // namespace faaslab::baselines
