#pragma once

#include <array>

namespace faaslab::env {

inline constexpr int kObservationSize = 6;

// Raw per-window observation fields, in feature order.
struct Observation {
  double tau_seconds = 0.0;  // mean completion time
  double phi = 1.0;          // completed fraction of the window's arrivals
  long q = 0;                // arrivals in the window
  int n = 1;                 // replicas at close
  double cpu_util = 0.0;
  double mem_util = 0.0;
};

// Fixed scales mapping raw fields into [0, 1] network inputs.
struct ObservationScale {
  double timeout_seconds = 10.0;
  double q_norm = 1.0;  // arrival count mapped to 1.0 (larger counts clamp)
  int n_min = 1;
  int n_max = 24;
  double util_cap = 2.0;

  void validate() const;
  std::array<double, kObservationSize> normalize(const Observation& obs) const;
  // Inverse of normalize, except q saturates at q_norm and rounds to a count.
  Observation denormalize(const std::array<double, kObservationSize>& v) const;
};

}  // namespace faaslab::env
