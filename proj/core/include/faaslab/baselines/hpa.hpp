#pragma once

#include <deque>
#include <utility>
#include <vector>

#include "faaslab/sim/simulator.hpp"

namespace faaslab::baselines {

struct HpaConfig {
  double target_cpu = 0.75;
  double query_period_seconds = 15.0;
  double downscale_stabilization_seconds = 300.0;
  int min_replicas = 1;
  int max_replicas = 24;
  double tolerance = 0.10;  // no-op band around the target, as a ratio

  // util_cap and window_seconds come from the cluster being scaled.
  void validate(double util_cap, double window_seconds) const;
};

// Standard desired-replica rule: ceil(current * measured / target), clamped
// to [min, max]. Measurements within the tolerance band keep the count.
int hpa_desired(int current_replicas, double measured_cpu, const HpaConfig& cfg);

// CPU-target controller with asymmetric latency: a higher desired count
// applies at the next sample, a lower one only once every recommendation in
// the trailing stabilization window agrees. The window is seeded with the
// first sample's replica count, standing in for the unobserved history.
class HpaController {
 public:
  explicit HpaController(HpaConfig cfg);

  // Feeds one utilization sample; returns the replica delta to apply now.
  // Samples must arrive in time order.
  int observe(double time, double measured_cpu, int current_replicas);

  const HpaConfig& config() const { return cfg_; }

 private:
  HpaConfig cfg_;
  std::deque<std::pair<double, int>> recommendations_;  // (time, desired)
  double last_time_ = 0.0;
  bool seen_any_ = false;
};

// Advances one simulator window under the controller, sampling utilization at
// every probe and applying deltas immediately. The controller's query period
// must match the simulator's probe period, and both must agree on bounds.
sim::WindowMetrics hpa_window(sim::FaasSimulator& s, HpaController& ctrl,
                              std::vector<sim::Request> arrivals);

}  // namespace faaslab::baselines
