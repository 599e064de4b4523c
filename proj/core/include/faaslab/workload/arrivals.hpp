#pragma once

#include <array>
#include <vector>

#include "faaslab/common/rng.hpp"
#include "faaslab/sim/config.hpp"
#include "faaslab/sim/types.hpp"

namespace faaslab::workload {

// Probability of each request size class, in SizeClass order.
struct SizeMix {
  std::array<double, 3> p{0.3, 0.5, 0.2};
  void validate() const;  // entries >= 0 and summing to 1
};

struct ArrivalPlan {
  std::vector<double> timestamps;  // sorted, strictly inside the window
  std::vector<sim::SizeClass> size_classes;
};

// Expands a per-window invocation count into arrival times by drawing
// exponential gaps at rate count / window_seconds until the window closes.
// The realized number of arrivals is therefore Poisson-distributed with mean
// close to `count`; a count of 0 yields an empty plan.
ArrivalPlan sample_arrivals(long count, double window_start, double window_seconds,
                            const SizeMix& mix, Rng& rng);

// Attaches the configured per-class service time to each planned arrival.
std::vector<sim::Request> make_requests(const ArrivalPlan& plan, const sim::SimConfig& cfg);

}  // namespace faaslab::workload
