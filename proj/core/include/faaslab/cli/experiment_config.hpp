#pragma once

#include <filesystem>
#include <string>

#include "faaslab/agents/factory.hpp"
#include "faaslab/baselines/hpa.hpp"
#include "faaslab/baselines/rps.hpp"
#include "faaslab/env/scaling_env.hpp"
#include "faaslab/workload/trace.hpp"

namespace faaslab::cli {

// Where the per-window invocation counts come from. A non-empty trace_path
// wins; otherwise a deterministic synthetic trace is generated.
struct WorkloadSpec {
  std::string trace_path;
  std::string pattern = "diurnal-sine";
  long windows = 3600;
  long scale = 24;
  unsigned long long trace_seed = 7;
};

struct EvalSpec {
  double split_fraction = 0.8;  // leading share of the trace reserved for training
  long windows = 200;           // evaluation rows to emit (a whole number of episodes)
};

// One experiment, fully described: the same document drives train, eval and
// baseline runs so their workloads line up. Serialized as a single JSON file
// whose canonical dump (sorted keys, two-space indent) round-trips byte for
// byte. Replica bounds live under "sim" only; reward and baseline configs
// mirror them when the document is parsed.
struct ExperimentConfig {
  int version = 1;
  unsigned long long seed = 42;
  long episodes = 200;
  long checkpoint_every = 50;  // episodes between rolling checkpoint writes
  std::string output_dir = "runs";

  WorkloadSpec workload;
  workload::SizeMix mix;
  EvalSpec eval;

  sim::SimConfig sim;
  env::RewardConfig reward;

  std::vector<int> action_deltas{-2, -1, 0, 1, 2};
  int episode_windows = 10;
  double q_norm = 0.0;

  agents::AgentSpec agent;
  baselines::HpaConfig hpa;
  baselines::RpsConfig rps;

  // Structural checks plus file existence for a referenced trace.
  void validate() const;
};

// Strict parser: unknown keys, wrong types and out-of-range values are
// ValidationErrors naming the offending JSON path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& cfg);

workload::Trace build_trace(const ExperimentConfig& cfg);
env::EnvConfig build_env_config(const ExperimentConfig& cfg);

// First window of the held-out evaluation region.
long eval_start_window(const ExperimentConfig& cfg, const workload::Trace& trace);

// Training view: the leading split of the trace, renamed so runs self-describe.
workload::Trace training_slice(const ExperimentConfig& cfg, const workload::Trace& trace);

}  // namespace faaslab::cli
