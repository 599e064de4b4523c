#pragma once

#include <vector>

#include "faaslab/sim/simulator.hpp"

namespace faaslab::baselines {

struct RpsConfig {
  double rps_threshold = 5.0;       // alert when the per-second rate exceeds this
  double sustain_seconds = 10.0;    // consecutive seconds above threshold to fire
  double scale_step_fraction = 0.2; // each alert adds ceil(fraction * max) replicas
  double quiet_seconds = 300.0;     // consecutive sub-threshold seconds before min
  int min_replicas = 1;
  int max_replicas = 24;
  bool count_arrivals = false;  // rate arrived requests instead of processed ones

  void validate() const;
};

// Alert-driven controller over a per-second request-rate stream. An alert
// fires after `sustain` consecutive seconds above threshold, adds one step,
// and latches until the rate falls back below threshold; a long quiet spell
// collapses the fleet to the minimum. Pure function of the stream and config.
class RpsController {
 public:
  RpsController(RpsConfig cfg, int initial_replicas);

  // Advances one second carrying `count` requests.
  void tick_second(long count);

  int desired_replicas() const { return desired_; }
  const RpsConfig& config() const { return cfg_; }

 private:
  RpsConfig cfg_;
  int desired_;
  long streak_ = 0;   // consecutive seconds above threshold
  long quiet_ = 0;    // consecutive seconds at or below threshold
  bool latched_ = false;
};

// Advances one simulator window, then feeds the window's request stream
// (completions by default, arrivals behind the config flag) to the controller
// second by second and applies the resulting delta at the window boundary.
// The window length must be a whole number of seconds.
sim::WindowMetrics rps_window(sim::FaasSimulator& s, RpsController& ctrl,
                              std::vector<sim::Request> arrivals);

}  // namespace faaslab::baselines
