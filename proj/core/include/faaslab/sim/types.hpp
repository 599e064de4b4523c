#pragma once

#include <optional>
#include <vector>

#include "faaslab/sim/config.hpp"

namespace faaslab::sim {

enum class RequestOutcome { InFlight = 0, Completed = 1, TimedOut = 2, Rejected = 3 };

struct Request {
  double arrival_time = 0.0;
  SizeClass size_class = SizeClass::Medium;
  double service_seconds = 0.0;
  std::optional<double> started_at;  // set when execution begins
  RequestOutcome outcome = RequestOutcome::InFlight;
};

enum class ReplicaPhase {
  ColdStarting,  // provisioning; cannot serve yet
  Warm,          // serving
  Draining,      // excluded from dispatch and from the replica count; dies when idle
};

// Everything the simulator reports about one closed window.
struct WindowMetrics {
  int index = 0;
  double window_start = 0.0;
  double window_end = 0.0;

  double tau_seconds = 0.0;  // mean arrival-to-completion time over completions in the window
  double phi = 1.0;          // fraction of this window's arrivals completed by close
  long arrivals = 0;
  int replicas = 0;          // non-draining replicas at close
  double cpu_util = 0.0;     // mean per-replica cpu share at close
  double mem_util = 0.0;     // mean per-replica mem share at close

  // Event counts inside the window (by event time, not by arrival window).
  long completed = 0;
  long timed_out = 0;
  long rejected = 0;
  long inflight_carried_in = 0;  // unresolved requests at window open
  long inflight_at_close = 0;    // unresolved requests at close

  std::vector<double> completion_times;  // absolute times of completions in the window, ordered
};

// Sub-window utilization sample handed to a probe callback.
struct ProbeSample {
  double time = 0.0;
  double interval_seconds = 0.0;
  double cpu_util = 0.0;  // mean per-replica cpu share over the interval
  int replicas = 0;       // non-draining replicas at sample time
};

}  // namespace faaslab::sim
