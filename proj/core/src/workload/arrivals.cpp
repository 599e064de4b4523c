#include "faaslab/workload/arrivals.hpp"

#include <cmath>
#include <random>

#include "faaslab/common/error.hpp"

namespace faaslab::workload {

void SizeMix::validate() const {
  double sum = 0.0;
  for (double v : p) {
    require(v >= 0.0, "size mix probabilities must be >= 0");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "size mix probabilities must sum to 1");
}

ArrivalPlan sample_arrivals(long count, double window_start, double window_seconds,
                            const SizeMix& mix, Rng& rng) {
  require(count >= 0, "sample_arrivals: count must be >= 0");
  require(window_seconds > 0.0, "sample_arrivals: window must be positive");
  mix.validate();

  ArrivalPlan plan;
  if (count == 0) return plan;

  const double rate = static_cast<double>(count) / window_seconds;
  std::exponential_distribution<double> gap(rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double window_end = window_start + window_seconds;

  double t = window_start;
  for (;;) {
    t += gap(rng);
    if (t >= window_end) break;
    plan.timestamps.push_back(t);

    const double u = unit(rng);
    double cum = 0.0;
    auto size = sim::SizeClass::Large;  // falls through when u lands in the tail
    for (int k = 0; k < sim::kSizeClassCount; ++k) {
      cum += mix.p[static_cast<std::size_t>(k)];
      if (u < cum) {
        size = static_cast<sim::SizeClass>(k);
        break;
      }
    }
    plan.size_classes.push_back(size);
  }
  return plan;
}

std::vector<sim::Request> make_requests(const ArrivalPlan& plan, const sim::SimConfig& cfg) {
  contract(plan.timestamps.size() == plan.size_classes.size(),
           "arrival plan lists must be parallel");
  std::vector<sim::Request> out;
  out.reserve(plan.timestamps.size());
  for (std::size_t i = 0; i < plan.timestamps.size(); ++i) {
    sim::Request r;
    r.arrival_time = plan.timestamps[i];
    r.size_class = plan.size_classes[i];
    r.service_seconds = cfg.service_for(r.size_class);
    out.push_back(r);
  }
  return out;
}

}  // namespace faaslab::workload
