#pragma once

#include <memory>
#include <string>

#include "faaslab/agents/drqn.hpp"
#include "faaslab/agents/ppo.hpp"
#include "faaslab/agents/rppo.hpp"

namespace faaslab::agents {

// Every learner's knobs in one bundle; kind selects which set applies.
struct AgentSpec {
  std::string kind = "rppo";  // "rppo", "ppo", or "drqn"
  RppoConfig rppo;
  PpoConfig ppo;
  DrqnConfig drqn;
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, int obs_size, int action_count,
                                  std::uint64_t seed);

}  // namespace faaslab::agents
