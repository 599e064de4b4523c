#include "faaslab/agents/factory.hpp"

#include "faaslab/common/error.hpp"

namespace faaslab::agents {

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, int obs_size, int action_count,
                                  std::uint64_t seed) {
  if (spec.kind == "rppo") {
    return std::make_unique<RppoAgent>(obs_size, action_count, spec.rppo, seed);
  }
  if (spec.kind == "ppo") {
    return std::make_unique<PpoAgent>(obs_size, action_count, spec.ppo, seed);
  }
  if (spec.kind == "drqn") {
    return std::make_unique<DrqnAgent>(obs_size, action_count, spec.drqn, seed);
  }
  throw ValidationError("unknown agent kind '" + spec.kind + "' (expected rppo, ppo, or drqn)");
}

}  // namespace faaslab::agents
