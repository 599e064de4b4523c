#include "faaslab/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::sim {

void SimConfig::validate() const {
  require(window_seconds > 0.0, "window_seconds must be positive");
  require(min_replicas >= 1, "min_replicas must be at least 1");
  require(max_replicas >= min_replicas, "max_replicas must be >= min_replicas");
  require(function_cpu_millicores > 0, "function_cpu_millicores must be positive");
  require(function_mem_mb > 0.0, "function_mem_mb must be positive");
  require(timeout_seconds > 0.0, "timeout_seconds must be positive");
  require(cold_start_seconds >= 0.0, "cold_start_seconds must be >= 0");
  require(per_replica_concurrency >= 1, "per_replica_concurrency must be at least 1");
  require(util_cap >= 1.0, "util_cap must be >= 1");
  require(queue_capacity >= 0, "queue_capacity must be >= 0");
  for (int i = 0; i < kSizeClassCount; ++i) {
    require(service_seconds[i] > 0.0, "service_seconds must be positive");
    require(cpu_demand_factor[i] >= 0.0, "cpu_demand_factor must be >= 0");
    require(per_request_mem_mb[i] >= 0.0, "per_request_mem_mb must be >= 0");
  }
  require(overload_coeff >= 0.0, "overload_coeff must be >= 0");
  require(idle_cpu_baseline >= 0.0 && idle_cpu_baseline <= util_cap,
          "idle_cpu_baseline must lie in [0, util_cap]");
  require(base_mem_mb >= 0.0, "base_mem_mb must be >= 0");
  require(probe_period_seconds > 0.0 && probe_period_seconds <= window_seconds,
          "probe_period_seconds must lie in (0, window_seconds]");
}

double replica_cpu_utilization(const SimConfig& cfg, double busy_weighted_seconds,
                               double queued_share_seconds, double interval_seconds) {
  contract(interval_seconds > 0.0, "cpu utilization needs a positive interval");
  const double load =
      (busy_weighted_seconds + cfg.overload_coeff * queued_share_seconds) / interval_seconds;
  return std::min(cfg.util_cap, std::max(cfg.idle_cpu_baseline, load));
}

double replica_mem_utilization(const SimConfig& cfg, double peak_request_mem_mb) {
  return std::min(cfg.util_cap, (cfg.base_mem_mb + peak_request_mem_mb) / cfg.function_mem_mb);
}

FaasSimulator::FaasSimulator(SimConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  pool_.reserve(static_cast<std::size_t>(cfg_.max_replicas));
  for (int i = 0; i < cfg_.min_replicas; ++i) {
    ReplicaRec r;
    r.id = next_replica_id_++;
    r.phase = ReplicaPhase::Warm;
    pool_.push_back(r);
  }
}

FaasSimulator::ReqRec& FaasSimulator::rec(long idx) {
  contract(idx >= arena_base_ && idx - arena_base_ < static_cast<long>(arena_.size()),
           "request index out of range");
  return arena_[static_cast<std::size_t>(idx - arena_base_)];
}

FaasSimulator::ReplicaRec* FaasSimulator::find_replica(int id) {
  for (auto& r : pool_)
    if (r.id == id) return &r;
  return nullptr;
}

void FaasSimulator::push_event(double t, int kind, long req, int replica) {
  Event ev;
  ev.t = t;
  ev.kind = kind;
  ev.seq = next_seq_++;
  ev.req = req;
  ev.replica = replica;
  events_.push(ev);
}

int FaasSimulator::replica_count() const {
  int n = 0;
  for (const auto& r : pool_)
    if (r.phase != ReplicaPhase::Draining) ++n;
  return n;
}

long FaasSimulator::live_queue_count() const {
  long n = 0;
  for (long idx : queue_) {
    const auto& rr = arena_[static_cast<std::size_t>(idx - arena_base_)];
    if (rr.req.outcome == RequestOutcome::InFlight) ++n;
  }
  return n;
}

long FaasSimulator::queue_length() const { return live_queue_count(); }

long FaasSimulator::inflight() const {
  return static_cast<long>(running_.size()) + live_queue_count();
}

void FaasSimulator::attribute_elapsed(double t) {
  for (auto& ex : running_) {
    const double dt = t - ex.accounted;
    if (dt <= 0.0) continue;
    ReplicaRec* r = find_replica(ex.replica);
    contract(r != nullptr, "running execution on a removed replica");
    const double w = dt * cfg_.demand_for(rec(ex.req).req.size_class);
    r->busy_win += w;
    r->busy_probe += w;
    ex.accounted = t;
  }
  for (long idx : queue_) {
    ReqRec& rr = rec(idx);
    if (rr.req.outcome != RequestOutcome::InFlight) continue;
    const double dt = t - rr.queue_accounted;
    if (dt <= 0.0) continue;
    queued_win_ += dt;
    queued_probe_ += dt;
    rr.queue_accounted = t;
  }
}

// Starts queued requests on free warm replicas until one side runs out.
// A request that can no longer meet its deadline — it must start strictly
// before the deadline and finish no later than it — times out on the spot
// without occupying a slot.
void FaasSimulator::dispatch_ready() {
  for (;;) {
    while (!queue_.empty() && rec(queue_.front()).req.outcome != RequestOutcome::InFlight)
      queue_.pop_front();
    if (queue_.empty()) return;

    ReplicaRec* best = nullptr;
    for (auto& r : pool_) {
      if (r.phase != ReplicaPhase::Warm || r.busy >= cfg_.per_replica_concurrency) continue;
      if (best == nullptr || r.busy < best->busy || (r.busy == best->busy && r.id < best->id))
        best = &r;
    }
    if (best == nullptr) return;

    const long idx = queue_.front();
    ReqRec& rr = rec(idx);
    if (now_ >= rr.deadline || now_ + rr.req.service_seconds > rr.deadline) {
      resolve_timeout(idx, now_);
      queue_.pop_front();
      continue;
    }

    queue_.pop_front();
    const double waited = now_ - rr.queue_accounted;
    if (waited > 0.0) {
      queued_win_ += waited;
      queued_probe_ += waited;
    }
    rr.queue_accounted = now_;
    rr.req.started_at = now_;

    Exec ex;
    ex.req = idx;
    ex.replica = best->id;
    ex.accounted = now_;
    running_.push_back(ex);

    best->busy += 1;
    best->mem_level += cfg_.request_mem_for(rr.req.size_class);
    best->mem_peak = std::max(best->mem_peak, best->mem_level);

    push_event(now_ + rr.req.service_seconds, kFinish, idx, best->id);
  }
}

void FaasSimulator::resolve_timeout(long idx, double t) {
  ReqRec& rr = rec(idx);
  contract(rr.req.outcome == RequestOutcome::InFlight, "timeout on a resolved request");
  const double waited = t - rr.queue_accounted;
  if (waited > 0.0) {
    queued_win_ += waited;
    queued_probe_ += waited;
  }
  rr.queue_accounted = t;
  rr.req.outcome = RequestOutcome::TimedOut;
  timed_out_w_ += 1;
}

void FaasSimulator::remove_replica_at(std::size_t pos) {
  pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(pos));
}

void FaasSimulator::finish_execution(const Event& ev) {
  auto it = std::find_if(running_.begin(), running_.end(),
                         [&](const Exec& e) { return e.req == ev.req; });
  contract(it != running_.end(), "finish event for an unknown execution");

  ReplicaRec* r = find_replica(it->replica);
  contract(r != nullptr, "finish event on a removed replica");

  ReqRec& rr = rec(ev.req);
  const double dt = ev.t - it->accounted;
  if (dt > 0.0) {
    const double w = dt * cfg_.demand_for(rr.req.size_class);
    r->busy_win += w;
    r->busy_probe += w;
  }
  r->busy -= 1;
  r->mem_level -= cfg_.request_mem_for(rr.req.size_class);
  running_.erase(it);

  rr.req.outcome = RequestOutcome::Completed;
  completed_w_ += 1;
  sojourn_sum_ += ev.t - rr.req.arrival_time;
  completions_w_.push_back(ev.t);

  if (r->phase == ReplicaPhase::Draining && r->busy == 0) {
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (pool_[i].id == r->id) {
        remove_replica_at(i);
        break;
      }
    }
  }
  dispatch_ready();
}

void FaasSimulator::apply_scaling(int delta) {
  const int current = replica_count();
  const int target = current + delta;
  contract(target >= cfg_.min_replicas && target <= cfg_.max_replicas,
           "apply_scaling target outside [min_replicas, max_replicas]");

  if (delta > 0) {
    bool warmed = false;
    for (int i = 0; i < delta; ++i) {
      ReplicaRec r;
      r.id = next_replica_id_++;
      if (cfg_.cold_start_seconds > 0.0) {
        r.phase = ReplicaPhase::ColdStarting;
        push_event(now_ + cfg_.cold_start_seconds, kReplicaReady, -1, r.id);
      } else {
        r.phase = ReplicaPhase::Warm;
        warmed = true;
      }
      pool_.push_back(r);
    }
    if (warmed) dispatch_ready();
    return;
  }

  // Victim order: cold first, then idle warm (removed at once), then busy
  // warm (drained). Newest replica first within each class.
  int to_remove = -delta;
  auto take = [&](auto pred, bool drain) {
    while (to_remove > 0) {
      int best_pos = -1;
      for (std::size_t i = 0; i < pool_.size(); ++i) {
        if (!pred(pool_[i])) continue;
        if (best_pos < 0 || pool_[i].id > pool_[static_cast<std::size_t>(best_pos)].id)
          best_pos = static_cast<int>(i);
      }
      if (best_pos < 0) return;
      if (drain) {
        pool_[static_cast<std::size_t>(best_pos)].phase = ReplicaPhase::Draining;
      } else {
        remove_replica_at(static_cast<std::size_t>(best_pos));
      }
      --to_remove;
    }
  };
  take([](const ReplicaRec& r) { return r.phase == ReplicaPhase::ColdStarting; }, false);
  take([](const ReplicaRec& r) { return r.phase == ReplicaPhase::Warm && r.busy == 0; }, false);
  take([](const ReplicaRec& r) { return r.phase == ReplicaPhase::Warm && r.busy > 0; }, true);
  contract(to_remove == 0, "scale-down could not find enough replicas");
}

void FaasSimulator::fire_probe(double t, const ProbeFn& probe) {
  attribute_elapsed(t);
  const double interval = t - last_probe_;
  contract(interval > 0.0, "probe interval must be positive");

  int non_cold = 0;
  for (const auto& r : pool_)
    if (r.phase != ReplicaPhase::ColdStarting) ++non_cold;

  double cpu = cfg_.idle_cpu_baseline;
  if (non_cold > 0) {
    const double qshare = queued_probe_ / non_cold;
    double sum = 0.0;
    for (const auto& r : pool_) {
      if (r.phase == ReplicaPhase::ColdStarting) continue;
      sum += replica_cpu_utilization(cfg_, r.busy_probe, qshare, interval);
    }
    cpu = sum / non_cold;
  }

  ProbeSample sample;
  sample.time = t;
  sample.interval_seconds = interval;
  sample.cpu_util = cpu;
  sample.replicas = replica_count();

  for (auto& r : pool_) r.busy_probe = 0.0;
  queued_probe_ = 0.0;
  last_probe_ = t;

  const int delta = probe(sample);
  if (delta != 0) apply_scaling(delta);
}

WindowMetrics FaasSimulator::advance_window(std::vector<Request> arrivals) {
  return advance_window(std::move(arrivals), ProbeFn{});
}

WindowMetrics FaasSimulator::advance_window(std::vector<Request> arrivals, const ProbeFn& probe) {
  win_start_ = now_;
  win_end_ = now_ + cfg_.window_seconds;

  contract(std::is_sorted(arrivals.begin(), arrivals.end(),
                          [](const Request& a, const Request& b) {
                            return a.arrival_time < b.arrival_time;
                          }),
           "arrivals must be sorted by arrival_time");
  for (const auto& a : arrivals) {
    contract(a.arrival_time >= win_start_ && a.arrival_time < win_end_,
             "arrival outside the window being simulated");
    contract(a.service_seconds > 0.0, "arrival with non-positive service time");
    contract(a.outcome == RequestOutcome::InFlight && !a.started_at.has_value(),
             "arrival must be an unresolved, unstarted request");
  }

  // reset per-window accounting
  for (auto& r : pool_) {
    r.busy_win = 0.0;
    r.busy_probe = 0.0;
    r.mem_peak = r.mem_level;
  }
  queued_win_ = 0.0;
  queued_probe_ = 0.0;
  last_probe_ = win_start_;
  completed_w_ = 0;
  timed_out_w_ = 0;
  rejected_w_ = 0;
  sojourn_sum_ = 0.0;
  completions_w_.clear();
  window_arrivals_.clear();
  inflight_open_ = inflight();

  for (auto& a : arrivals) {
    ReqRec rr;
    rr.req = a;
    rr.deadline = a.arrival_time + cfg_.timeout_seconds;
    const long idx = arena_base_ + static_cast<long>(arena_.size());
    arena_.push_back(rr);
    window_arrivals_.push_back(idx);
    push_event(a.arrival_time, kArrival, idx, -1);
  }

  if (probe) {
    const int probes =
        static_cast<int>(std::floor(cfg_.window_seconds / cfg_.probe_period_seconds + 1e-9));
    for (int k = 1; k <= probes; ++k)
      push_event(win_start_ + k * cfg_.probe_period_seconds, kProbe, -1, -1);
  }
  push_event(win_end_, kWindowClose, -1, -1);

  for (;;) {
    contract(!events_.empty(), "event heap drained before window close");
    const Event ev = events_.top();
    events_.pop();
    contract(ev.t >= now_ - 1e-9, "event time moved backwards");
    now_ = std::max(now_, ev.t);

    if (ev.kind == kWindowClose) {
      contract(ev.t == win_end_, "window close fired at the wrong time");
      break;
    }
    switch (ev.kind) {
      case kFinish:
        finish_execution(ev);
        break;
      case kReplicaReady: {
        ReplicaRec* r = find_replica(ev.replica);
        if (r != nullptr && r->phase == ReplicaPhase::ColdStarting) {
          r->phase = ReplicaPhase::Warm;
          dispatch_ready();
        }
        break;
      }
      case kDeadline: {
        if (ev.req < arena_base_) break;  // already resolved and pruned
        ReqRec& rr = rec(ev.req);
        if (rr.req.outcome == RequestOutcome::InFlight) resolve_timeout(ev.req, ev.t);
        break;
      }
      case kArrival: {
        ReqRec& rr = rec(ev.req);
        if (cfg_.queue_capacity > 0 && live_queue_count() >= cfg_.queue_capacity) {
          rr.req.outcome = RequestOutcome::Rejected;
          rejected_w_ += 1;
          break;
        }
        rr.queue_accounted = ev.t;
        queue_.push_back(ev.req);
        push_event(rr.deadline, kDeadline, ev.req, -1);
        dispatch_ready();
        break;
      }
      case kProbe:
        fire_probe(ev.t, probe);
        break;
      default:
        contract(false, "unknown event kind");
    }
  }

  now_ = win_end_;
  attribute_elapsed(win_end_);
  return close_window();
}

WindowMetrics FaasSimulator::close_window() {
  WindowMetrics m;
  m.index = windows_closed_;
  m.window_start = win_start_;
  m.window_end = win_end_;
  m.arrivals = static_cast<long>(window_arrivals_.size());
  m.completed = completed_w_;
  m.timed_out = timed_out_w_;
  m.rejected = rejected_w_;
  m.inflight_carried_in = inflight_open_;
  m.inflight_at_close = inflight();
  m.completion_times = completions_w_;
  m.replicas = replica_count();

  long own_completed = 0;
  for (long idx : window_arrivals_)
    if (rec(idx).req.outcome == RequestOutcome::Completed) ++own_completed;
  m.phi = m.arrivals == 0 ? 1.0
                          : static_cast<double>(own_completed) / static_cast<double>(m.arrivals);
  m.tau_seconds = completed_w_ == 0 ? 0.0 : sojourn_sum_ / static_cast<double>(completed_w_);

  int non_cold = 0;
  for (const auto& r : pool_)
    if (r.phase != ReplicaPhase::ColdStarting) ++non_cold;
  if (non_cold == 0) {
    m.cpu_util = cfg_.idle_cpu_baseline;
    m.mem_util = replica_mem_utilization(cfg_, 0.0);
  } else {
    const double qshare = queued_win_ / non_cold;
    double cpu = 0.0;
    double mem = 0.0;
    for (const auto& r : pool_) {
      if (r.phase == ReplicaPhase::ColdStarting) continue;
      cpu += replica_cpu_utilization(cfg_, r.busy_win, qshare, cfg_.window_seconds);
      mem += replica_mem_utilization(cfg_, r.mem_peak);
    }
    m.cpu_util = cpu / non_cold;
    m.mem_util = mem / non_cold;
  }

  // Drop resolved records from the front of the arena. Queue indices are
  // strictly increasing, so purging the queue head first lets the prune run
  // up to the oldest entry still referenced.
  while (!queue_.empty() && rec(queue_.front()).req.outcome != RequestOutcome::InFlight)
    queue_.pop_front();
  while (!arena_.empty() && arena_.front().req.outcome != RequestOutcome::InFlight &&
         (queue_.empty() || queue_.front() != arena_base_)) {
    arena_.pop_front();
    ++arena_base_;
  }

  windows_closed_ += 1;
  return m;
}

}  // namespace faaslab::sim
