#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "faaslab/cli/run_csv.hpp"

namespace faaslab::cli {

// Aggregates of one evaluation or baseline run, all recomputable from the
// window CSV alone: episodic reward divides the reward sum by the episode
// count, execution time averages tau over windows that completed anything.
struct RunSummary {
  std::string policy;
  long windows = 0;
  long episodes = 0;
  double mean_episodic_reward = 0.0;
  double mean_phi = 0.0;
  double mean_replicas = 0.0;
  double mean_exec_seconds = 0.0;  // 0 when no window had a success
  long invalid_actions = 0;
  double wall_clock_seconds = 0.0;  // measured, not derivable from the CSV
};

RunSummary summarize_rows(const std::vector<WindowRow>& rows, int episode_windows);

// Digest of the workload a run actually replayed: the consumed per-window
// counts, the run seed, and the region label ("train"/"eval"). Runs are only
// comparable when these digests agree.
std::uint64_t workload_digest(std::span<const long> counts, unsigned long long seed,
                              std::string_view region);

// Sidecar describing a window CSV; written next to it as <stem>.meta.json.
struct RunMeta {
  std::string policy;
  unsigned long long seed = 0;
  long windows = 0;
  int episode_windows = 0;
  std::uint64_t workload_hash = 0;
  RunSummary summary;
};

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path);
void write_meta(const std::filesystem::path& path, const RunMeta& meta);
RunMeta read_meta(const std::filesystem::path& path);

}  // namespace faaslab::cli
