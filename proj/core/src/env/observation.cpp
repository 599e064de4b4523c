#include "faaslab/env/observation.hpp"

#include <algorithm>
#include <cmath>

#include "faaslab/common/error.hpp"

namespace faaslab::env {

void ObservationScale::validate() const {
  require(timeout_seconds > 0.0, "observation scale: timeout must be positive");
  require(q_norm >= 1.0, "observation scale: q_norm must be >= 1");
  require(n_min >= 1 && n_max >= n_min, "observation scale: replica bounds out of order");
  require(util_cap > 0.0, "observation scale: util_cap must be positive");
}

std::array<double, kObservationSize> ObservationScale::normalize(const Observation& obs) const {
  const int span = std::max(1, n_max - n_min);
  return {
      obs.tau_seconds / timeout_seconds,
      obs.phi,
      std::min(1.0, static_cast<double>(obs.q) / q_norm),
      static_cast<double>(obs.n - n_min) / span,
      obs.cpu_util / util_cap,
      obs.mem_util / util_cap,
  };
}

Observation ObservationScale::denormalize(const std::array<double, kObservationSize>& v) const {
  const int span = std::max(1, n_max - n_min);
  Observation obs;
  obs.tau_seconds = v[0] * timeout_seconds;
  obs.phi = v[1];
  obs.q = std::lround(v[2] * q_norm);
  obs.n = static_cast<int>(std::lround(v[3] * span)) + n_min;
  obs.cpu_util = v[4] * util_cap;
  obs.mem_util = v[5] * util_cap;
  return obs;
}

}  // namespace faaslab::env
