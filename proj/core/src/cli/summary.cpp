#include "faaslab/cli/summary.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "faaslab/common/error.hpp"
#include "faaslab/nn/checkpoint.hpp"

namespace faaslab::cli {

using nlohmann::json;

RunSummary summarize_rows(const std::vector<WindowRow>& rows, int episode_windows) {
  require(episode_windows >= 1, "summary: episode_windows must be >= 1");
  require(!rows.empty(), "summary: no rows");
  require(rows.size() % static_cast<std::size_t>(episode_windows) == 0,
          "summary: row count is not a whole number of episodes");

  RunSummary s;
  s.policy = rows.front().policy;
  s.windows = static_cast<long>(rows.size());
  s.episodes = s.windows / episode_windows;

  double reward_sum = 0.0, phi_sum = 0.0, n_sum = 0.0, tau_sum = 0.0;
  long tau_windows = 0;
  for (const auto& r : rows) {
    reward_sum += r.reward;
    phi_sum += r.phi;
    n_sum += static_cast<double>(r.n);
    if (r.tau > 0.0) {
      tau_sum += r.tau;
      ++tau_windows;
    }
    if (r.valid == 0) ++s.invalid_actions;
  }
  s.mean_episodic_reward = reward_sum / static_cast<double>(s.episodes);
  s.mean_phi = phi_sum / static_cast<double>(s.windows);
  s.mean_replicas = n_sum / static_cast<double>(s.windows);
  s.mean_exec_seconds = tau_windows > 0 ? tau_sum / static_cast<double>(tau_windows) : 0.0;
  return s;
}

std::uint64_t workload_digest(std::span<const long> counts, unsigned long long seed,
                              std::string_view region) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (long c : counts) {
    std::uint64_t v = static_cast<std::uint64_t>(c);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    h = nn::fnv1a64(bytes, sizeof bytes, h);
  }
  unsigned char seed_bytes[8];
  for (int i = 0; i < 8; ++i)
    seed_bytes[i] = static_cast<unsigned char>((seed >> (8 * i)) & 0xff);
  h = nn::fnv1a64(seed_bytes, sizeof seed_bytes, h);
  return nn::fnv1a64(region.data(), region.size(), h);
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s, const std::filesystem::path& path) {
  if (s.size() != 18 || s[0] != '0' || s[1] != 'x')
    throw ValidationError("meta: " + path.string() + ": bad workload_hash '" + s + "'");
  return std::stoull(s.substr(2), nullptr, 16);
}

}  // namespace

void write_meta(const std::filesystem::path& path, const RunMeta& meta) {
  json s;
  s["episodes"] = meta.summary.episodes;
  s["invalid_actions"] = meta.summary.invalid_actions;
  s["mean_episodic_reward"] = meta.summary.mean_episodic_reward;
  s["mean_exec_seconds"] = meta.summary.mean_exec_seconds;
  s["mean_phi"] = meta.summary.mean_phi;
  s["mean_replicas"] = meta.summary.mean_replicas;
  s["policy"] = meta.summary.policy;
  s["wall_clock_seconds"] = meta.summary.wall_clock_seconds;
  s["windows"] = meta.summary.windows;

  json j;
  j["episode_windows"] = meta.episode_windows;
  j["policy"] = meta.policy;
  j["seed"] = meta.seed;
  j["summary"] = s;
  j["windows"] = meta.windows;
  j["workload_hash"] = hex64(meta.workload_hash);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("meta: cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw ValidationError("meta: short write to " + path.string());
}

RunMeta read_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("meta: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("meta: " + path.string() + ": invalid JSON: " + e.what());
  }
  try {
    RunMeta m;
    m.policy = j.at("policy").get<std::string>();
    m.seed = j.at("seed").get<unsigned long long>();
    m.windows = j.at("windows").get<long>();
    m.episode_windows = j.at("episode_windows").get<int>();
    m.workload_hash = parse_hex64(j.at("workload_hash").get<std::string>(), path);
    const json& s = j.at("summary");
    m.summary.policy = s.at("policy").get<std::string>();
    m.summary.windows = s.at("windows").get<long>();
    m.summary.episodes = s.at("episodes").get<long>();
    m.summary.mean_episodic_reward = s.at("mean_episodic_reward").get<double>();
    m.summary.mean_phi = s.at("mean_phi").get<double>();
    m.summary.mean_replicas = s.at("mean_replicas").get<double>();
    m.summary.mean_exec_seconds = s.at("mean_exec_seconds").get<double>();
    m.summary.invalid_actions = s.at("invalid_actions").get<long>();
    m.summary.wall_clock_seconds = s.at("wall_clock_seconds").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw ValidationError("meta: " + path.string() + ": " + e.what());
  }
}

}  // namespace faaslab::cli
