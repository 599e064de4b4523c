#include "faaslab/baselines/rps.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::baselines {

void RpsConfig::validate() const {
  require(rps_threshold > 0.0, "rps_threshold must be positive");
  require(sustain_seconds >= 1.0, "sustain must be at least one second");
  require(scale_step_fraction > 0.0 && scale_step_fraction <= 1.0,
          "scale_step_fraction must lie in (0, 1]");
  require(quiet_seconds > 0.0, "quiet_seconds must be positive");
  require(min_replicas >= 1 && max_replicas >= min_replicas,
          "replica bounds must satisfy 1 <= min <= max");
}

RpsController::RpsController(RpsConfig cfg, int initial_replicas)
    : cfg_(cfg), desired_(initial_replicas) {
  cfg_.validate();
  contract(initial_replicas >= cfg_.min_replicas && initial_replicas <= cfg_.max_replicas,
           "initial replicas outside the configured bounds");
}

void RpsController::tick_second(long count) {
  contract(count >= 0, "per-second count must be non-negative");
  if (static_cast<double>(count) > cfg_.rps_threshold) {
    ++streak_;
    quiet_ = 0;
    if (!latched_ && static_cast<double>(streak_) >= cfg_.sustain_seconds) {
      latched_ = true;  // one step per alert; re-arms only after resolution
      const int step =
          static_cast<int>(std::ceil(cfg_.scale_step_fraction * cfg_.max_replicas));
      desired_ = std::clamp(desired_ + step, cfg_.min_replicas, cfg_.max_replicas);
    }
  } else {
    streak_ = 0;
    latched_ = false;
    ++quiet_;
    if (static_cast<double>(quiet_) >= cfg_.quiet_seconds) {
      desired_ = cfg_.min_replicas;
    }
  }
}

sim::WindowMetrics rps_window(sim::FaasSimulator& s, RpsController& ctrl,
                              std::vector<sim::Request> arrivals) {
  const sim::SimConfig& sc = s.config();
  contract(ctrl.config().min_replicas == sc.min_replicas &&
               ctrl.config().max_replicas == sc.max_replicas,
           "controller and simulator replica bounds must agree");
  const long seconds = std::lround(sc.window_seconds);
  contract(static_cast<double>(seconds) == sc.window_seconds && seconds >= 1,
           "window must be a whole number of seconds");

  std::vector<double> stream_times;
  if (ctrl.config().count_arrivals) {
    stream_times.reserve(arrivals.size());
    for (const auto& r : arrivals) stream_times.push_back(r.arrival_time);
  }

  const sim::WindowMetrics m = s.advance_window(std::move(arrivals));
  if (!ctrl.config().count_arrivals) stream_times = m.completion_times;

  std::vector<long> buckets(static_cast<std::size_t>(seconds), 0);
  for (double t : stream_times) {
    long k = static_cast<long>(std::floor(t - m.window_start));
    if (k == seconds && t == m.window_end) k = seconds - 1;  // close-boundary completion
    if (k >= 0 && k < seconds) ++buckets[static_cast<std::size_t>(k)];
  }
  for (long b : buckets) ctrl.tick_second(b);

  const int delta = ctrl.desired_replicas() - s.replica_count();
  if (delta != 0) s.apply_scaling(delta);
  return m;
}

}  // namespace faaslab::baselines
