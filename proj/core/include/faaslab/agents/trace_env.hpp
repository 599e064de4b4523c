#pragma once

#include <cstdint>
#include <vector>

#include "faaslab/agents/rollout.hpp"
#include "faaslab/env/scaling_env.hpp"

namespace faaslab::agents {

// Per-episode aggregates for reporting; rewards are raw objective units.
struct EpisodeRecord {
  long episode = 0;
  long trace_cursor = 0;
  double reward_raw = 0.0;     // sum over the episode
  double mean_phi = 0.0;
  double mean_replicas = 0.0;
  double mean_tau = 0.0;       // mean completion time, zero-windows included
  long invalid_actions = 0;
};

// Adapts the scaling environment to the agent-facing rollout interface:
// normalizes observations, schedules trace cursors across episodes, and
// keeps per-episode records for telemetry.
class TraceEnv final : public RolloutEnv {
 public:
  // WrapStride walks the trace in episode-sized strides and wraps at the end
  // (training); Sequential never wraps and throws past the last cursor
  // (evaluation over distinct slices).
  enum class CursorMode { WrapStride, Sequential };

  TraceEnv(env::EnvConfig cfg, workload::Trace trace, std::uint64_t seed, CursorMode mode);

  int observation_size() const override { return env::kObservationSize; }
  int action_count() const override { return env_.action_count(); }
  std::vector<double> reset() override;
  Step step(int action) override;

  long episodes_started() const { return next_episode_; }
  const std::vector<EpisodeRecord>& episodes() const { return completed_; }
  std::vector<EpisodeRecord> drain_episodes();
  const env::ScalingEnv& inner() const { return env_; }

 private:
  env::ScalingEnv env_;
  std::uint64_t seed_;
  CursorMode mode_;
  long next_episode_ = 0;
  EpisodeRecord current_{};
  std::vector<EpisodeRecord> completed_;
};

}  // namespace faaslab::agents
