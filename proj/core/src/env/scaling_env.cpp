#include "faaslab/env/scaling_env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "faaslab/common/error.hpp"

namespace faaslab::env {

namespace {

double percentile99(std::vector<long> counts) {
  contract(!counts.empty(), "percentile of an empty trace");
  std::sort(counts.begin(), counts.end());
  const auto n = static_cast<double>(counts.size());
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * n));  // nearest-rank, 1-based
  const long value = counts[std::min(counts.size(), std::max<std::size_t>(rank, 1)) - 1];
  return std::max(1.0, static_cast<double>(value));
}

}  // namespace

void EnvConfig::validate() const {
  sim.validate();
  reward.validate();
  mix.validate();
  require(reward.n_min == sim.min_replicas && reward.n_max == sim.max_replicas,
          "env: reward replica bounds must mirror the simulator bounds");
  require(episode_windows >= 1, "env: episode_windows must be >= 1");
  require(q_norm >= 0.0, "env: q_norm must be >= 0 (0 = derive from trace)");

  require(!action_deltas.empty(), "env: action_deltas must not be empty");
  require(std::is_sorted(action_deltas.begin(), action_deltas.end()) &&
              std::adjacent_find(action_deltas.begin(), action_deltas.end()) ==
                  action_deltas.end(),
          "env: action_deltas must be strictly increasing");
  bool has_zero = false;
  for (int d : action_deltas) {
    if (d == 0) has_zero = true;
    require(std::find(action_deltas.begin(), action_deltas.end(), -d) != action_deltas.end(),
            "env: action_deltas must be symmetric around 0");
  }
  require(has_zero, "env: action_deltas must contain 0");
}

ScalingEnv::ScalingEnv(EnvConfig cfg, workload::Trace trace)
    : cfg_(std::move(cfg)), trace_(std::move(trace)) {
  cfg_.validate();
  require(trace_.windows() >= cfg_.episode_windows + 1,
          "env: trace shorter than one episode (warm-up window plus steps)");

  scale_.timeout_seconds = cfg_.sim.timeout_seconds;
  scale_.n_min = cfg_.sim.min_replicas;
  scale_.n_max = cfg_.sim.max_replicas;
  scale_.util_cap = cfg_.sim.util_cap;
  scale_.q_norm = cfg_.q_norm > 0.0 ? cfg_.q_norm : percentile99(trace_.counts);
  scale_.validate();
}

int ScalingEnv::replica_count() const {
  contract(sim_ != nullptr, "replica_count before reset");
  return sim_->replica_count();
}

Observation ScalingEnv::reset(unsigned long long seed, long trace_cursor) {
  if (trace_cursor < 0 || trace_cursor > max_cursor()) {
    std::ostringstream msg;
    msg << "env: episode at cursor " << trace_cursor << " needs windows up to "
        << trace_cursor + cfg_.episode_windows << " but the trace has " << trace_.windows();
    throw ValidationError(msg.str());
  }
  sim_ = std::make_unique<sim::FaasSimulator>(cfg_.sim);
  rng_.seed(derive_seed(seed, static_cast<unsigned long long>(trace_cursor)));
  cursor_ = trace_cursor;
  step_count_ = 0;
  in_episode_ = true;
  return run_window(0);  // warm-up: no scaling decision yet
}

Observation ScalingEnv::run_window(int delta_or_zero) {
  if (delta_or_zero != 0) sim_->apply_scaling(delta_or_zero);
  const long count = trace_.counts[static_cast<std::size_t>(cursor_)];
  const auto plan =
      workload::sample_arrivals(count, sim_->now(), cfg_.sim.window_seconds, cfg_.mix, rng_);
  last_metrics_ = sim_->advance_window(workload::make_requests(plan, cfg_.sim));
  ++cursor_;

  Observation obs;
  obs.tau_seconds = last_metrics_.tau_seconds;
  obs.phi = last_metrics_.phi;
  obs.q = last_metrics_.arrivals;
  obs.n = last_metrics_.replicas;
  obs.cpu_util = last_metrics_.cpu_util;
  obs.mem_util = last_metrics_.mem_util;
  return obs;
}

ScalingEnv::StepResult ScalingEnv::step(int action_index) {
  contract(sim_ != nullptr && in_episode_, "step before reset");
  contract(!done(), "step on a finished episode");
  contract(action_index >= 0 && action_index < action_count(), "action index out of range");

  const int delta = cfg_.action_deltas[static_cast<std::size_t>(action_index)];
  const int n = sim_->replica_count();
  const bool valid =
      n + delta >= cfg_.sim.min_replicas && n + delta <= cfg_.sim.max_replicas;

  StepResult result;
  result.observation = run_window(valid ? delta : 0);
  step_count_ += 1;

  result.action_valid = valid;
  result.applied_delta = valid ? delta : 0;
  result.reward = valid ? reward_fn(result.observation.phi, result.observation.n,
                                    result.observation.cpu_util, result.observation.mem_util,
                                    true, cfg_.reward)
                        : cfg_.reward.r_min;
  result.done = done();
  result.metrics = last_metrics_;
  result.window_index = step_count_;
  return result;
}

}  // namespace faaslab::env
