#pragma once

#include <memory>
#include <vector>

#include "faaslab/common/rng.hpp"
#include "faaslab/env/observation.hpp"
#include "faaslab/env/reward.hpp"
#include "faaslab/sim/simulator.hpp"
#include "faaslab/workload/arrivals.hpp"
#include "faaslab/workload/trace.hpp"

namespace faaslab::env {

struct EnvConfig {
  sim::SimConfig sim;
  RewardConfig reward;
  workload::SizeMix mix;
  std::vector<int> action_deltas{-2, -1, 0, 1, 2};
  int episode_windows = 10;
  double q_norm = 0.0;  // 0 = derive from the trace's 99th-percentile count

  // Checks each part and their agreement (reward bounds mirror the sim's).
  void validate() const;
};

// Episodic wrapper around the cluster simulator. reset() rebuilds the cluster
// at n_min warm replicas and runs one warm-up window (no scaling action) at
// the trace cursor; each step() decodes a replica delta, simulates the next
// trace window, and pays the objective reward. An episode therefore consumes
// episode_windows + 1 consecutive trace windows. Invalid actions leave the
// cluster unchanged, still consume a window, and earn r_min.
class ScalingEnv {
 public:
  struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    // diagnostics
    sim::WindowMetrics metrics;
    bool action_valid = true;
    int applied_delta = 0;
    int window_index = 0;  // 1-based step count within the episode
  };

  ScalingEnv(EnvConfig cfg, workload::Trace trace);

  Observation reset(unsigned long long seed, long trace_cursor);
  StepResult step(int action_index);

  bool done() const { return step_count_ >= cfg_.episode_windows; }
  int action_count() const { return static_cast<int>(cfg_.action_deltas.size()); }
  int observation_size() const { return kObservationSize; }
  const ObservationScale& scale() const { return scale_; }
  const EnvConfig& config() const { return cfg_; }
  const workload::Trace& trace() const { return trace_; }
  int replica_count() const;

  // windows a reset cursor may start at: cursor + episode_windows + 1 <= trace length
  long max_cursor() const { return trace_.windows() - cfg_.episode_windows - 1; }

 private:
  Observation run_window(int delta_or_zero);

  EnvConfig cfg_;
  workload::Trace trace_;
  ObservationScale scale_;
  std::unique_ptr<sim::FaasSimulator> sim_;
  Rng rng_;
  sim::WindowMetrics last_metrics_;
  long cursor_ = 0;      // trace window consumed next
  int step_count_ = 0;   // steps taken since reset
  bool in_episode_ = false;
};

}  // namespace faaslab::env
