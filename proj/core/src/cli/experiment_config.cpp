#include "faaslab/cli/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "faaslab/common/error.hpp"

namespace faaslab::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

const json& member(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing key");
  return *it;
}

// Every object must carry exactly the expected keys: silent typos in a config
// would otherwise run the experiment with a default the user meant to change.
void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double get_real(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

long get_int(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<long>();
}

unsigned long long get_uint(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_number_unsigned()) fail(join(path, key), "expected a non-negative integer");
  return v.get<unsigned long long>();
}

bool get_bool(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_boolean()) fail(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::array<double, 3> get_triple(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_array() || v.size() != 3) fail(join(path, key), "expected an array of 3 numbers");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) fail(join(path, key), "expected an array of 3 numbers");
    out[static_cast<std::size_t>(i)] = v[i].get<double>();
  }
  return out;
}

std::vector<int> get_int_list(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_array()) fail(join(path, key), "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) fail(join(path, key), "expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

json triple(const std::array<double, 3>& a) { return json{a[0], a[1], a[2]}; }

json rppo_json(const agents::RppoConfig& c) {
  json j;
  j["clip_eps"] = c.clip_eps;
  j["entropy_coef"] = c.entropy_coef;
  j["episodes_per_update"] = c.episodes_per_update;
  j["epochs"] = c.epochs;
  j["gae_discount"] = c.gae.discount;
  j["gae_lambda"] = c.gae.lambda;
  j["head_hidden"] = c.head_hidden;
  j["learning_rate"] = c.learning_rate;
  j["lstm_hidden"] = c.lstm_hidden;
  j["max_grad_norm"] = c.max_grad_norm;
  j["minibatch_episodes"] = c.minibatch_episodes;
  j["reward_scale"] = c.reward_scale;
  j["shared_lstm"] = c.shared_lstm;
  j["value_coef"] = c.value_coef;
  return j;
}

agents::RppoConfig rppo_from(const json& j, const std::string& path) {
  check_keys(j, path,
             {"clip_eps", "entropy_coef", "episodes_per_update", "epochs", "gae_discount",
              "gae_lambda", "head_hidden", "learning_rate", "lstm_hidden", "max_grad_norm",
              "minibatch_episodes", "reward_scale", "shared_lstm", "value_coef"});
  agents::RppoConfig c;
  c.clip_eps = get_real(j, path, "clip_eps");
  c.entropy_coef = get_real(j, path, "entropy_coef");
  c.episodes_per_update = static_cast<int>(get_int(j, path, "episodes_per_update"));
  c.epochs = static_cast<int>(get_int(j, path, "epochs"));
  c.gae.discount = get_real(j, path, "gae_discount");
  c.gae.lambda = get_real(j, path, "gae_lambda");
  c.head_hidden = get_int_list(j, path, "head_hidden");
  c.learning_rate = get_real(j, path, "learning_rate");
  c.lstm_hidden = static_cast<int>(get_int(j, path, "lstm_hidden"));
  c.max_grad_norm = get_real(j, path, "max_grad_norm");
  c.minibatch_episodes = static_cast<int>(get_int(j, path, "minibatch_episodes"));
  c.reward_scale = get_real(j, path, "reward_scale");
  c.shared_lstm = get_bool(j, path, "shared_lstm");
  c.value_coef = get_real(j, path, "value_coef");
  return c;
}

json ppo_json(const agents::PpoConfig& c) {
  json j;
  j["clip_eps"] = c.clip_eps;
  j["entropy_coef"] = c.entropy_coef;
  j["epochs"] = c.epochs;
  j["gae_discount"] = c.gae.discount;
  j["gae_lambda"] = c.gae.lambda;
  j["hidden"] = c.hidden;
  j["learning_rate"] = c.learning_rate;
  j["max_grad_norm"] = c.max_grad_norm;
  j["minibatch_size"] = c.minibatch_size;
  j["reward_scale"] = c.reward_scale;
  j["steps_per_update"] = c.steps_per_update;
  j["value_coef"] = c.value_coef;
  return j;
}

agents::PpoConfig ppo_from(const json& j, const std::string& path) {
  check_keys(j, path,
             {"clip_eps", "entropy_coef", "epochs", "gae_discount", "gae_lambda", "hidden",
              "learning_rate", "max_grad_norm", "minibatch_size", "reward_scale",
              "steps_per_update", "value_coef"});
  agents::PpoConfig c;
  c.clip_eps = get_real(j, path, "clip_eps");
  c.entropy_coef = get_real(j, path, "entropy_coef");
  c.epochs = static_cast<int>(get_int(j, path, "epochs"));
  c.gae.discount = get_real(j, path, "gae_discount");
  c.gae.lambda = get_real(j, path, "gae_lambda");
  c.hidden = get_int_list(j, path, "hidden");
  c.learning_rate = get_real(j, path, "learning_rate");
  c.max_grad_norm = get_real(j, path, "max_grad_norm");
  c.minibatch_size = static_cast<int>(get_int(j, path, "minibatch_size"));
  c.reward_scale = get_real(j, path, "reward_scale");
  c.steps_per_update = static_cast<int>(get_int(j, path, "steps_per_update"));
  c.value_coef = get_real(j, path, "value_coef");
  return c;
}

json drqn_json(const agents::DrqnConfig& c) {
  json j;
  j["batch_size"] = c.batch_size;
  j["burn_in"] = c.burn_in;
  j["discount"] = c.discount;
  j["epsilon_decay_steps"] = c.epsilon_decay_steps;
  j["epsilon_end"] = c.epsilon_end;
  j["epsilon_start"] = c.epsilon_start;
  j["gradient_steps_per_episode"] = c.gradient_steps_per_episode;
  j["head_hidden"] = c.head_hidden;
  j["huber_delta"] = c.huber_delta;
  j["learning_rate"] = c.learning_rate;
  j["lstm_hidden"] = c.lstm_hidden;
  j["max_grad_norm"] = c.max_grad_norm;
  j["min_replay_episodes"] = c.min_replay_episodes;
  j["replay_capacity"] = c.replay_capacity;
  j["reward_scale"] = c.reward_scale;
  j["sequence_length"] = c.sequence_length;
  j["target_sync_every"] = c.target_sync_every;
  return j;
}

agents::DrqnConfig drqn_from(const json& j, const std::string& path) {
  check_keys(j, path,
             {"batch_size", "burn_in", "discount", "epsilon_decay_steps", "epsilon_end",
              "epsilon_start", "gradient_steps_per_episode", "head_hidden", "huber_delta",
              "learning_rate", "lstm_hidden", "max_grad_norm", "min_replay_episodes",
              "replay_capacity", "reward_scale", "sequence_length", "target_sync_every"});
  agents::DrqnConfig c;
  c.batch_size = static_cast<int>(get_int(j, path, "batch_size"));
  c.burn_in = static_cast<int>(get_int(j, path, "burn_in"));
  c.discount = get_real(j, path, "discount");
  c.epsilon_decay_steps = get_int(j, path, "epsilon_decay_steps");
  c.epsilon_end = get_real(j, path, "epsilon_end");
  c.epsilon_start = get_real(j, path, "epsilon_start");
  c.gradient_steps_per_episode = static_cast<int>(get_int(j, path, "gradient_steps_per_episode"));
  c.head_hidden = get_int_list(j, path, "head_hidden");
  c.huber_delta = get_real(j, path, "huber_delta");
  c.learning_rate = get_real(j, path, "learning_rate");
  c.lstm_hidden = static_cast<int>(get_int(j, path, "lstm_hidden"));
  c.max_grad_norm = get_real(j, path, "max_grad_norm");
  c.min_replay_episodes = static_cast<int>(get_int(j, path, "min_replay_episodes"));
  c.replay_capacity = get_int(j, path, "replay_capacity");
  c.reward_scale = get_real(j, path, "reward_scale");
  c.sequence_length = static_cast<int>(get_int(j, path, "sequence_length"));
  c.target_sync_every = get_int(j, path, "target_sync_every");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;

  json agent;
  agent["drqn"] = drqn_json(c.agent.drqn);
  agent["kind"] = c.agent.kind;
  agent["ppo"] = ppo_json(c.agent.ppo);
  agent["rppo"] = rppo_json(c.agent.rppo);
  j["agent"] = agent;

  json hpa;
  hpa["downscale_stabilization_seconds"] = c.hpa.downscale_stabilization_seconds;
  hpa["query_period_seconds"] = c.hpa.query_period_seconds;
  hpa["target_cpu"] = c.hpa.target_cpu;
  hpa["tolerance"] = c.hpa.tolerance;
  json rps;
  rps["count_arrivals"] = c.rps.count_arrivals;
  rps["quiet_seconds"] = c.rps.quiet_seconds;
  rps["rps_threshold"] = c.rps.rps_threshold;
  rps["scale_step_fraction"] = c.rps.scale_step_fraction;
  rps["sustain_seconds"] = c.rps.sustain_seconds;
  j["baselines"] = json{{"hpa", hpa}, {"rps", rps}};

  json e;
  e["action_deltas"] = c.action_deltas;
  e["episode_windows"] = c.episode_windows;
  e["q_norm"] = c.q_norm;
  j["env"] = e;

  j["episodes"] = c.episodes;
  j["eval"] = json{{"split_fraction", c.eval.split_fraction}, {"windows", c.eval.windows}};
  j["output_dir"] = c.output_dir;

  json r;
  r["alpha"] = c.reward.alpha;
  r["beta"] = c.reward.beta;
  r["gamma_w"] = c.reward.gamma_w;
  r["r_min"] = c.reward.r_min;
  j["reward"] = r;

  j["seed"] = c.seed;

  json s;
  s["base_mem_mb"] = c.sim.base_mem_mb;
  s["cold_start_seconds"] = c.sim.cold_start_seconds;
  s["cpu_demand_factor"] = triple(c.sim.cpu_demand_factor);
  s["function_cpu_millicores"] = c.sim.function_cpu_millicores;
  s["function_mem_mb"] = c.sim.function_mem_mb;
  s["idle_cpu_baseline"] = c.sim.idle_cpu_baseline;
  s["max_replicas"] = c.sim.max_replicas;
  s["min_replicas"] = c.sim.min_replicas;
  s["overload_coeff"] = c.sim.overload_coeff;
  s["per_replica_concurrency"] = c.sim.per_replica_concurrency;
  s["per_request_mem_mb"] = triple(c.sim.per_request_mem_mb);
  s["probe_period_seconds"] = c.sim.probe_period_seconds;
  s["queue_capacity"] = c.sim.queue_capacity;
  s["service_seconds"] = triple(c.sim.service_seconds);
  s["timeout_seconds"] = c.sim.timeout_seconds;
  s["util_cap"] = c.sim.util_cap;
  s["window_seconds"] = c.sim.window_seconds;
  j["sim"] = s;

  j["train"] = json{{"checkpoint_every", c.checkpoint_every}};
  j["version"] = c.version;

  json w;
  w["mix"] = json{c.mix.p[0], c.mix.p[1], c.mix.p[2]};
  w["pattern"] = c.workload.pattern;
  w["scale"] = c.workload.scale;
  w["trace_path"] = c.workload.trace_path;
  w["trace_seed"] = c.workload.trace_seed;
  w["windows"] = c.workload.windows;
  j["workload"] = w;

  return j;
}

ExperimentConfig from_json(const json& j) {
  check_keys(j, "",
             {"agent", "baselines", "env", "episodes", "eval", "output_dir", "reward", "seed",
              "sim", "train", "version", "workload"});
  ExperimentConfig c;

  c.version = static_cast<int>(get_int(j, "", "version"));
  if (c.version != 1) fail("version", "unsupported config version " + std::to_string(c.version));
  c.seed = get_uint(j, "", "seed");
  c.episodes = get_int(j, "", "episodes");
  c.output_dir = get_string(j, "", "output_dir");

  const json& tr = member(j, "", "train");
  check_keys(tr, "train", {"checkpoint_every"});
  c.checkpoint_every = get_int(tr, "train", "checkpoint_every");

  const json& w = member(j, "", "workload");
  check_keys(w, "workload", {"mix", "pattern", "scale", "trace_path", "trace_seed", "windows"});
  const auto mix = get_triple(w, "workload", "mix");
  c.mix.p = mix;
  c.workload.pattern = get_string(w, "workload", "pattern");
  c.workload.scale = get_int(w, "workload", "scale");
  c.workload.trace_path = get_string(w, "workload", "trace_path");
  c.workload.trace_seed = get_uint(w, "workload", "trace_seed");
  c.workload.windows = get_int(w, "workload", "windows");

  const json& ev = member(j, "", "eval");
  check_keys(ev, "eval", {"split_fraction", "windows"});
  c.eval.split_fraction = get_real(ev, "eval", "split_fraction");
  c.eval.windows = get_int(ev, "eval", "windows");

  const json& s = member(j, "", "sim");
  check_keys(s, "sim",
             {"base_mem_mb", "cold_start_seconds", "cpu_demand_factor", "function_cpu_millicores",
              "function_mem_mb", "idle_cpu_baseline", "max_replicas", "min_replicas",
              "overload_coeff", "per_replica_concurrency", "per_request_mem_mb",
              "probe_period_seconds", "queue_capacity", "service_seconds", "timeout_seconds",
              "util_cap", "window_seconds"});
  c.sim.base_mem_mb = get_real(s, "sim", "base_mem_mb");
  c.sim.cold_start_seconds = get_real(s, "sim", "cold_start_seconds");
  c.sim.cpu_demand_factor = get_triple(s, "sim", "cpu_demand_factor");
  c.sim.function_cpu_millicores = static_cast<int>(get_int(s, "sim", "function_cpu_millicores"));
  c.sim.function_mem_mb = get_real(s, "sim", "function_mem_mb");
  c.sim.idle_cpu_baseline = get_real(s, "sim", "idle_cpu_baseline");
  c.sim.max_replicas = static_cast<int>(get_int(s, "sim", "max_replicas"));
  c.sim.min_replicas = static_cast<int>(get_int(s, "sim", "min_replicas"));
  c.sim.overload_coeff = get_real(s, "sim", "overload_coeff");
  c.sim.per_replica_concurrency = static_cast<int>(get_int(s, "sim", "per_replica_concurrency"));
  c.sim.per_request_mem_mb = get_triple(s, "sim", "per_request_mem_mb");
  c.sim.probe_period_seconds = get_real(s, "sim", "probe_period_seconds");
  c.sim.queue_capacity = get_int(s, "sim", "queue_capacity");
  c.sim.service_seconds = get_triple(s, "sim", "service_seconds");
  c.sim.timeout_seconds = get_real(s, "sim", "timeout_seconds");
  c.sim.util_cap = get_real(s, "sim", "util_cap");
  c.sim.window_seconds = get_real(s, "sim", "window_seconds");

  const json& r = member(j, "", "reward");
  check_keys(r, "reward", {"alpha", "beta", "gamma_w", "r_min"});
  c.reward.alpha = get_real(r, "reward", "alpha");
  c.reward.beta = get_real(r, "reward", "beta");
  c.reward.gamma_w = get_real(r, "reward", "gamma_w");
  c.reward.r_min = get_real(r, "reward", "r_min");

  const json& e = member(j, "", "env");
  check_keys(e, "env", {"action_deltas", "episode_windows", "q_norm"});
  c.action_deltas = get_int_list(e, "env", "action_deltas");
  c.episode_windows = static_cast<int>(get_int(e, "env", "episode_windows"));
  c.q_norm = get_real(e, "env", "q_norm");

  const json& a = member(j, "", "agent");
  check_keys(a, "agent", {"drqn", "kind", "ppo", "rppo"});
  c.agent.kind = get_string(a, "agent", "kind");
  c.agent.rppo = rppo_from(member(a, "agent", "rppo"), "agent.rppo");
  c.agent.ppo = ppo_from(member(a, "agent", "ppo"), "agent.ppo");
  c.agent.drqn = drqn_from(member(a, "agent", "drqn"), "agent.drqn");

  const json& b = member(j, "", "baselines");
  check_keys(b, "baselines", {"hpa", "rps"});
  const json& h = member(b, "baselines", "hpa");
  check_keys(h, "baselines.hpa",
             {"downscale_stabilization_seconds", "query_period_seconds", "target_cpu",
              "tolerance"});
  c.hpa.downscale_stabilization_seconds =
      get_real(h, "baselines.hpa", "downscale_stabilization_seconds");
  c.hpa.query_period_seconds = get_real(h, "baselines.hpa", "query_period_seconds");
  c.hpa.target_cpu = get_real(h, "baselines.hpa", "target_cpu");
  c.hpa.tolerance = get_real(h, "baselines.hpa", "tolerance");
  const json& p = member(b, "baselines", "rps");
  check_keys(p, "baselines.rps",
             {"count_arrivals", "quiet_seconds", "rps_threshold", "scale_step_fraction",
              "sustain_seconds"});
  c.rps.count_arrivals = get_bool(p, "baselines.rps", "count_arrivals");
  c.rps.quiet_seconds = get_real(p, "baselines.rps", "quiet_seconds");
  c.rps.rps_threshold = get_real(p, "baselines.rps", "rps_threshold");
  c.rps.scale_step_fraction = get_real(p, "baselines.rps", "scale_step_fraction");
  c.rps.sustain_seconds = get_real(p, "baselines.rps", "sustain_seconds");

  // Replica bounds are authored once, under sim.
  c.reward.n_min = c.sim.min_replicas;
  c.reward.n_max = c.sim.max_replicas;
  c.hpa.min_replicas = c.sim.min_replicas;
  c.hpa.max_replicas = c.sim.max_replicas;
  c.rps.min_replicas = c.sim.min_replicas;
  c.rps.max_replicas = c.sim.max_replicas;
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(episodes >= 1, "config: episodes must be >= 1");
  require(checkpoint_every >= 1, "config: train.checkpoint_every must be >= 1");
  require(!output_dir.empty(), "config: output_dir must not be empty");
  require(eval.split_fraction > 0.0 && eval.split_fraction < 1.0,
          "config: eval.split_fraction must be strictly between 0 and 1");
  require(eval.windows >= 1, "config: eval.windows must be >= 1");
  require(eval.windows % episode_windows == 0,
          "config: eval.windows must be a whole number of episodes");

  if (workload.trace_path.empty()) {
    workload::parse_trace_pattern(workload.pattern);  // throws on unknown names
    require(workload.windows >= 1, "config: workload.windows must be >= 1");
    require(workload.scale >= 0, "config: workload.scale must be >= 0");
  } else {
    require(std::filesystem::exists(workload.trace_path),
            "config: workload.trace_path does not exist: " + workload.trace_path);
  }

  require(agent.kind == "rppo" || agent.kind == "ppo" || agent.kind == "drqn",
          "config: agent.kind must be rppo, ppo, or drqn");
  agent.rppo.validate();
  agent.ppo.validate();
  agent.drqn.validate();

  build_env_config(*this).validate();
  hpa.validate(sim.util_cap, sim.window_seconds);
  require(hpa.query_period_seconds == sim.probe_period_seconds,
          "config: baselines.hpa.query_period_seconds must equal sim.probe_period_seconds");
  rps.validate();
  require(std::floor(sim.window_seconds) == sim.window_seconds,
          "config: sim.window_seconds must be a whole number of seconds");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

workload::Trace build_trace(const ExperimentConfig& cfg) {
  if (!cfg.workload.trace_path.empty()) return workload::load_trace(cfg.workload.trace_path);
  return workload::synth_trace(workload::parse_trace_pattern(cfg.workload.pattern),
                               cfg.workload.windows, cfg.workload.scale, cfg.workload.trace_seed);
}

env::EnvConfig build_env_config(const ExperimentConfig& cfg) {
  env::EnvConfig ec;
  ec.sim = cfg.sim;
  ec.reward = cfg.reward;
  ec.mix = cfg.mix;
  ec.action_deltas = cfg.action_deltas;
  ec.episode_windows = cfg.episode_windows;
  ec.q_norm = cfg.q_norm;
  return ec;
}

long eval_start_window(const ExperimentConfig& cfg, const workload::Trace& trace) {
  return static_cast<long>(std::floor(cfg.eval.split_fraction *
                                      static_cast<double>(trace.windows())));
}

workload::Trace training_slice(const ExperimentConfig& cfg, const workload::Trace& trace) {
  const long split = eval_start_window(cfg, trace);
  require(split >= cfg.episode_windows + 1,
          "config: training region shorter than one episode; grow the trace or the split");
  workload::Trace out;
  out.name = trace.name + "[train]";
  out.counts.assign(trace.counts.begin(), trace.counts.begin() + split);
  return out;
}

}  // namespace faaslab::cli
