#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "faaslab/cli/experiment_config.hpp"
#include "faaslab/cli/summary.hpp"

namespace faaslab::cli {

struct TrainOutput {
  std::filesystem::path episode_csv;
  std::filesystem::path checkpoint;
  long episodes = 0;
  double wall_clock_seconds = 0.0;
};

// Trains cfg.agent.kind on the leading split of the workload. Writes one
// episode row per training episode and a rolling checkpoint every
// cfg.checkpoint_every episodes plus a final one. A non-finite loss aborts
// the run but still leaves the last good checkpoint and CSV behind (the
// update that produced it is never applied).
TrainOutput run_train(const ExperimentConfig& cfg);

struct EvalOutput {
  std::filesystem::path window_csv;
  std::filesystem::path meta;
  RunSummary summary;
};

// Greedy policy over cfg.eval.windows held-out windows, one row per window.
// The agent architecture comes from the checkpoint's manifest kind and the
// matching hyperparameter block of cfg.
EvalOutput run_eval(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint);

// Threshold controller ("hpa" or "rps") over the same held-out windows and
// the same arrival realization as run_eval with this cfg.
EvalOutput run_baseline(const ExperimentConfig& cfg, const std::string& policy);

// Markdown report over previously written window CSVs: summaries recomputed
// from the rows, then pairwise relative deltas. Refuses runs whose window
// counts or workload digests differ.
std::string run_compare(const std::vector<std::filesystem::path>& csvs);

}  // namespace faaslab::cli
