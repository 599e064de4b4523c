#include "faaslab/agents/trace_env.hpp"

#include "faaslab/common/error.hpp"

namespace faaslab::agents {

TraceEnv::TraceEnv(env::EnvConfig cfg, workload::Trace trace, std::uint64_t seed, CursorMode mode)
    : env_(std::move(cfg), std::move(trace)), seed_(seed), mode_(mode) {}

std::vector<double> TraceEnv::reset() {
  const long stride = env_.config().episode_windows + 1;  // warm-up window included
  const long usable = env_.max_cursor() + 1;
  long cursor = next_episode_ * stride;
  if (mode_ == CursorMode::WrapStride) {
    cursor %= usable;
  } else {
    require(cursor <= env_.max_cursor(),
            "trace exhausted: episode " + std::to_string(next_episode_) +
                " needs cursor " + std::to_string(cursor) + " but the last start is " +
                std::to_string(env_.max_cursor()));
  }

  const env::Observation obs = env_.reset(derive_seed(seed_, next_episode_), cursor);
  current_ = EpisodeRecord{};
  current_.episode = next_episode_;
  current_.trace_cursor = cursor;
  ++next_episode_;

  const auto v = env_.scale().normalize(obs);
  return std::vector<double>(v.begin(), v.end());
}

RolloutEnv::Step TraceEnv::step(int action) {
  const env::ScalingEnv::StepResult r = env_.step(action);
  current_.reward_raw += r.reward;
  current_.mean_phi += r.metrics.phi;
  current_.mean_replicas += r.metrics.replicas;
  current_.mean_tau += r.metrics.tau_seconds;
  if (!r.action_valid) ++current_.invalid_actions;

  if (r.done) {
    const double steps = static_cast<double>(env_.config().episode_windows);
    current_.mean_phi /= steps;
    current_.mean_replicas /= steps;
    current_.mean_tau /= steps;
    completed_.push_back(current_);
  }

  const auto v = env_.scale().normalize(r.observation);
  return Step{std::vector<double>(v.begin(), v.end()), r.reward, r.done};
}

std::vector<EpisodeRecord> TraceEnv::drain_episodes() {
  std::vector<EpisodeRecord> out;
  out.swap(completed_);
  return out;
}

}  // namespace faaslab::agents
