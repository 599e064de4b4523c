#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace faaslab::cli {

// One evaluated window. `action` is the replica delta the policy asked for
// (agents) or the net replica change across the window (threshold baselines,
// whose deltas are always applied). `valid` is 0 when the request was out of
// bounds and therefore ignored by the cluster.
struct WindowRow {
  long window = 0;
  std::string policy;
  double tau = 0.0;
  double phi = 0.0;
  long q = 0;
  int n = 0;
  double c = 0.0;
  double m = 0.0;
  int action = 0;
  double reward = 0.0;
  int valid = 1;
};

inline constexpr const char* kWindowCsvHeader = "window,policy,tau,phi,q,n,c,m,action,reward,valid";

// One training episode's aggregates.
struct EpisodeRow {
  long episode = 0;
  long cursor = 0;
  double reward = 0.0;
  double phi = 0.0;
  double replicas = 0.0;
  double tau = 0.0;
  long invalid = 0;
};

inline constexpr const char* kEpisodeCsvHeader = "episode,cursor,reward,phi,replicas,tau,invalid";

// Reals carry six fractional digits; integers are plain; lines end in LF.
std::string format_real(double v);

void write_window_csv(const std::filesystem::path& path, const std::vector<WindowRow>& rows);
std::vector<WindowRow> read_window_csv(const std::filesystem::path& path);

void write_episode_csv(const std::filesystem::path& path, const std::vector<EpisodeRow>& rows);
std::vector<EpisodeRow> read_episode_csv(const std::filesystem::path& path);

}  // namespace faaslab::cli
