#pragma once

#include <deque>
#include <functional>
#include <queue>
#include <vector>

#include "faaslab/sim/types.hpp"

namespace faaslab::sim {

// Per-replica utilization formulas, shared by window metrics and probe samples.
// busy_weighted_seconds: sum over executions of (busy seconds * cpu_demand_factor).
// queued_share_seconds: this replica's share of cluster queued-request-seconds.
double replica_cpu_utilization(const SimConfig& cfg, double busy_weighted_seconds,
                               double queued_share_seconds, double interval_seconds);
double replica_mem_utilization(const SimConfig& cfg, double peak_request_mem_mb);

// Event-driven cluster of function replicas.
//
// Time advances one fixed window at a time; scaling decisions land either
// between windows (apply_scaling) or mid-window through a probe callback.
// Requests queue FIFO, are dispatched to the least-loaded warm replica, and
// time out if they cannot both start before and finish by arrival + timeout.
// Replicas selected for scale-down while busy drain: they finish their work,
// take no new requests, and stop counting toward the replica count at once.
class FaasSimulator {
 public:
  // sample -> replica delta to apply immediately (0 = no change); the delta
  // must keep the replica count within [min_replicas, max_replicas]
  using ProbeFn = std::function<int(const ProbeSample&)>;

  explicit FaasSimulator(SimConfig cfg);

  // Adds or removes |delta| replicas relative to the current count. New
  // replicas start cold. Removal prefers cold replicas, then idle warm ones
  // (dropped at once), then busy warm ones (drained); newest first in each
  // class. The resulting count must stay within [min_replicas, max_replicas].
  void apply_scaling(int delta);

  // Simulates one window. |arrivals| must lie within the window and be sorted
  // by arrival time. The probe callback, when given, fires every
  // probe_period_seconds inside the window (before close when they coincide).
  WindowMetrics advance_window(std::vector<Request> arrivals);
  WindowMetrics advance_window(std::vector<Request> arrivals, const ProbeFn& probe);

  int replica_count() const;  // non-draining replicas
  int pool_size() const { return static_cast<int>(pool_.size()); }
  long queue_length() const;  // waiting, unresolved requests
  long inflight() const;      // running + waiting
  double now() const { return now_; }
  int windows_closed() const { return windows_closed_; }
  const SimConfig& config() const { return cfg_; }

 private:
  enum EventKind : int {
    kFinish = 0,
    kReplicaReady = 1,
    kDeadline = 2,
    kArrival = 3,
    kProbe = 4,
    kWindowClose = 5,
  };

  struct Event {
    double t;
    int kind;
    unsigned long seq;
    long req = -1;
    int replica = -1;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t != b.t) return a.t > b.t;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.seq > b.seq;
    }
  };

  struct ReqRec {
    Request req;
    double deadline = 0.0;
    double queue_accounted = 0.0;  // queued time already attributed
  };

  struct Exec {
    long req = -1;
    int replica = -1;
    double accounted = 0.0;  // busy time attributed up to here
  };

  struct ReplicaRec {
    int id = -1;
    ReplicaPhase phase = ReplicaPhase::Warm;
    int busy = 0;
    double busy_win = 0.0;    // demand-weighted busy seconds since window open
    double busy_probe = 0.0;  // same, since the last probe
    double mem_level = 0.0;   // per-request mem held by running executions
    double mem_peak = 0.0;    // peak of mem_level since window open
  };

  ReqRec& rec(long idx);
  ReplicaRec* find_replica(int id);
  void push_event(double t, int kind, long req, int replica);
  void attribute_elapsed(double t);  // roll busy/queued time forward to t
  void dispatch_ready();
  void resolve_timeout(long idx, double t);
  void finish_execution(const Event& ev);
  void fire_probe(double t, const ProbeFn& probe);
  WindowMetrics close_window();
  long live_queue_count() const;
  void remove_replica_at(std::size_t pos);

  SimConfig cfg_;
  double now_ = 0.0;
  int windows_closed_ = 0;
  int next_replica_id_ = 0;
  unsigned long next_seq_ = 0;

  std::vector<ReplicaRec> pool_;
  std::vector<Exec> running_;
  std::deque<long> queue_;  // arena indices; resolved entries skipped lazily

  std::deque<ReqRec> arena_;
  long arena_base_ = 0;

  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;

  // per-window state
  double win_start_ = 0.0;
  double win_end_ = 0.0;
  double queued_win_ = 0.0;    // cluster queued-request-seconds since open
  double queued_probe_ = 0.0;  // same, since the last probe
  double last_probe_ = 0.0;
  long completed_w_ = 0;
  long timed_out_w_ = 0;
  long rejected_w_ = 0;
  long inflight_open_ = 0;
  double sojourn_sum_ = 0.0;
  std::vector<double> completions_w_;
  std::vector<long> window_arrivals_;  // arena indices of this window's arrivals
};

}  // namespace faaslab::sim
