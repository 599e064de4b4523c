#pragma once

#include <array>

namespace faaslab::sim {

enum class SizeClass { Small = 0, Medium = 1, Large = 2 };
inline constexpr int kSizeClassCount = 3;

// Cluster and function-profile knobs for the event-driven simulator.
// Utilization model: a replica's CPU share for an interval is
//   min(util_cap, max(idle_cpu_baseline,
//       (demand-weighted busy seconds + overload_coeff * queued-second share) / interval))
// and its memory share is min(util_cap, (base_mem_mb + peak in-flight mem) / function_mem_mb).
struct SimConfig {
  double window_seconds = 30.0;
  int max_replicas = 24;
  int min_replicas = 1;
  int function_cpu_millicores = 150;
  double function_mem_mb = 256.0;
  double timeout_seconds = 10.0;
  double cold_start_seconds = 2.0;
  int per_replica_concurrency = 1;
  double util_cap = 2.0;      // cap for both cpu and mem ratios
  long queue_capacity = 0;    // 0 = unbounded

  // per size class: Small, Medium, Large
  std::array<double, 3> service_seconds{0.5, 3.0, 8.0};
  std::array<double, 3> cpu_demand_factor{0.5, 1.0, 1.5};
  std::array<double, 3> per_request_mem_mb{16.0, 64.0, 192.0};

  double overload_coeff = 0.5;
  double idle_cpu_baseline = 0.05;
  double base_mem_mb = 64.0;
  double probe_period_seconds = 15.0;  // sub-window utilization sampling cadence

  double service_for(SizeClass s) const { return service_seconds[static_cast<int>(s)]; }
  double demand_for(SizeClass s) const { return cpu_demand_factor[static_cast<int>(s)]; }
  double request_mem_for(SizeClass s) const { return per_request_mem_mb[static_cast<int>(s)]; }

  // Throws ValidationError on out-of-range values.
  void validate() const;
};

}  // namespace faaslab::sim
