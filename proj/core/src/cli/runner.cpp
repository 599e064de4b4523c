#include "faaslab/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "faaslab/agents/trace_env.hpp"
#include "faaslab/common/error.hpp"
#include "faaslab/common/log.hpp"
#include "faaslab/common/rng.hpp"
#include "faaslab/env/reward.hpp"
#include "faaslab/nn/checkpoint.hpp"
#include "faaslab/workload/arrivals.hpp"

namespace faaslab::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::filesystem::path out_file(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

EpisodeRow to_row(const agents::EpisodeRecord& rec) {
  EpisodeRow row;
  row.episode = rec.episode;
  row.cursor = rec.trace_cursor;
  row.reward = rec.reward_raw;
  row.phi = rec.mean_phi;
  row.replicas = rec.mean_replicas;
  row.tau = rec.mean_tau;
  row.invalid = rec.invalid_actions;
  return row;
}

// Episode e of an evaluation or baseline run replays trace windows
// [cursor, cursor + episode_windows] with the rng stream the scaling
// environment derives for (seed_e, cursor); both runners below must agree.
struct EvalSchedule {
  long start = 0;
  long episodes = 0;
  long stride = 0;

  long cursor(long episode) const { return start + episode * stride; }
};

EvalSchedule eval_schedule(const ExperimentConfig& cfg, const workload::Trace& trace) {
  EvalSchedule s;
  s.start = eval_start_window(cfg, trace);
  s.episodes = cfg.eval.windows / cfg.episode_windows;
  s.stride = cfg.episode_windows + 1;
  const long needed = s.start + s.episodes * s.stride;
  if (needed > trace.windows()) {
    std::ostringstream msg;
    msg << "eval: " << cfg.eval.windows << " windows need trace windows up to " << needed
        << " (evaluation region starts at " << s.start << ") but the trace has "
        << trace.windows();
    throw ValidationError(msg.str());
  }
  return s;
}

std::uint64_t schedule_digest(const ExperimentConfig& cfg, const workload::Trace& trace,
                              const EvalSchedule& s) {
  const auto* base = trace.counts.data() + s.start;
  return workload_digest(std::span<const long>(base, static_cast<std::size_t>(s.episodes * s.stride)),
                         cfg.seed, "eval");
}

EvalOutput finish_run(const ExperimentConfig& cfg, const std::string& policy,
                      const std::string& file_stem, std::vector<WindowRow> rows,
                      std::uint64_t digest, double wall_clock) {
  EvalOutput out;
  out.window_csv = out_file(cfg, file_stem + ".csv");
  write_window_csv(out.window_csv, rows);

  // Summarize what was actually emitted, so the reported numbers are exactly
  // recomputable from the CSV despite its six-digit rounding.
  RunSummary summary = summarize_rows(read_window_csv(out.window_csv), cfg.episode_windows);
  summary.wall_clock_seconds = wall_clock;

  RunMeta meta;
  meta.policy = policy;
  meta.seed = cfg.seed;
  meta.windows = summary.windows;
  meta.episode_windows = cfg.episode_windows;
  meta.workload_hash = digest;
  meta.summary = summary;
  out.meta = meta_path_for(out.window_csv);
  write_meta(out.meta, meta);

  out.summary = summary;
  log::info("wrote " + out.window_csv.string() + " (" + std::to_string(summary.windows) +
            " windows, mean throughput " + format_real(summary.mean_phi) + ")");
  return out;
}

std::string describe(const agents::TrainUpdateStats& st) {
  std::ostringstream msg;
  msg << "update: env_steps=" << st.env_steps << " loss=" << st.loss
      << " policy_loss=" << st.policy_loss << " value_loss=" << st.value_loss
      << " entropy=" << st.entropy << " clip_fraction=" << st.clip_fraction
      << " approx_kl=" << st.approx_kl << " epsilon=" << st.epsilon
      << " mean_episode_reward=" << st.mean_episode_reward_raw;
  return msg.str();
}

}  // namespace

TrainOutput run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start_time = Clock::now();

  const workload::Trace trace = build_trace(cfg);
  env::EnvConfig ec = build_env_config(cfg);
  // Pin the arrival-count scale to the full trace before slicing, so training
  // and held-out evaluation feed the network identically normalized inputs.
  ec.q_norm = env::ScalingEnv(ec, trace).scale().q_norm;
  agents::TraceEnv env(ec, training_slice(cfg, trace), cfg.seed,
                       agents::TraceEnv::CursorMode::WrapStride);
  auto agent = agents::make_agent(cfg.agent, env.observation_size(), env.action_count(), cfg.seed);

  TrainOutput out;
  out.episode_csv = out_file(cfg, "train_" + cfg.agent.kind + "_seed" +
                                      std::to_string(cfg.seed) + ".csv");
  out.checkpoint = out_file(cfg, cfg.agent.kind + "_seed" + std::to_string(cfg.seed) + ".ckpt");

  std::vector<EpisodeRow> rows;
  long saved_at = -1;
  const auto collect = [&] {
    for (const auto& rec : env.drain_episodes()) rows.push_back(to_row(rec));
  };
  const auto flush = [&](bool force) {
    const long done = static_cast<long>(rows.size());
    if (done == saved_at) return;  // nothing learned since the last write
    if (!force && done / cfg.checkpoint_every <= saved_at / cfg.checkpoint_every) return;
    agent->save(out.checkpoint);
    saved_at = done;
    log::info("checkpoint after " + std::to_string(done) + " episodes: " +
              out.checkpoint.string());
  };

  const long budget = cfg.episodes * cfg.episode_windows;
  try {
    agent->train(env, budget, [&](const agents::TrainUpdateStats& st) {
      log::info(describe(st));
      collect();
      flush(false);
    });
  } catch (const TrainingError&) {
    // The failed update was never applied; persist the last good state.
    collect();
    flush(true);
    write_episode_csv(out.episode_csv, rows);
    throw;
  }
  collect();
  flush(true);
  write_episode_csv(out.episode_csv, rows);

  out.episodes = static_cast<long>(rows.size());
  out.wall_clock_seconds = seconds_since(start_time);
  log::info("trained " + cfg.agent.kind + " for " + std::to_string(out.episodes) +
            " episodes in " + format_real(out.wall_clock_seconds) + " s");
  return out;
}

EvalOutput run_eval(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint) {
  cfg.validate();
  if (!std::filesystem::exists(checkpoint))
    throw ValidationError("eval: checkpoint does not exist: " + checkpoint.string());
  const auto start_time = Clock::now();

  const workload::Trace trace = build_trace(cfg);
  const EvalSchedule sched = eval_schedule(cfg, trace);

  const std::string kind = nn::read_checkpoint_manifest(checkpoint).kind;
  agents::AgentSpec spec = cfg.agent;
  spec.kind = kind;
  auto agent = agents::make_agent(spec, env::kObservationSize,
                                  static_cast<int>(cfg.action_deltas.size()), cfg.seed);
  agent->load(checkpoint);

  env::ScalingEnv env(build_env_config(cfg), trace);
  std::vector<WindowRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.eval.windows));
  for (long e = 0; e < sched.episodes; ++e) {
    env::Observation obs = env.reset(derive_seed(cfg.seed, static_cast<unsigned long long>(e)),
                                     sched.cursor(e));
    agent->begin_episode();
    for (int w = 0; w < cfg.episode_windows; ++w) {
      const auto scaled = env.scale().normalize(obs);
      const int a = agent->act({scaled.begin(), scaled.end()}, /*greedy=*/true);
      const auto sr = env.step(a);

      WindowRow row;
      row.window = e * cfg.episode_windows + w;
      row.policy = kind;
      row.tau = sr.metrics.tau_seconds;
      row.phi = sr.metrics.phi;
      row.q = sr.metrics.arrivals;
      row.n = sr.metrics.replicas;
      row.c = sr.metrics.cpu_util;
      row.m = sr.metrics.mem_util;
      row.action = cfg.action_deltas[static_cast<std::size_t>(a)];
      row.reward = sr.reward;
      row.valid = sr.action_valid ? 1 : 0;
      rows.push_back(std::move(row));
      obs = sr.observation;
    }
  }

  return finish_run(cfg, kind, "eval_" + kind + "_seed" + std::to_string(cfg.seed),
                    std::move(rows), schedule_digest(cfg, trace, sched),
                    seconds_since(start_time));
}

EvalOutput run_baseline(const ExperimentConfig& cfg, const std::string& policy) {
  cfg.validate();
  if (policy != "hpa" && policy != "rps")
    throw ValidationError("baseline: unknown policy '" + policy + "' (expected hpa or rps)");
  const auto start_time = Clock::now();

  const workload::Trace trace = build_trace(cfg);
  const EvalSchedule sched = eval_schedule(cfg, trace);

  std::vector<WindowRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.eval.windows));
  for (long e = 0; e < sched.episodes; ++e) {
    const long cursor = sched.cursor(e);
    sim::FaasSimulator s(cfg.sim);
    // Same arrival realization as an agent evaluated with this seed.
    Rng rng(derive_seed(derive_seed(cfg.seed, static_cast<unsigned long long>(e)),
                        static_cast<unsigned long long>(cursor)));
    const auto window_requests = [&](long trace_window) {
      const auto plan = workload::sample_arrivals(trace.counts[static_cast<std::size_t>(trace_window)],
                                                  s.now(), cfg.sim.window_seconds, cfg.mix, rng);
      return workload::make_requests(plan, cfg.sim);
    };

    s.advance_window(window_requests(cursor));  // warm-up, no controller yet

    baselines::HpaController hpa_ctrl{cfg.hpa};
    baselines::RpsController rps_ctrl{cfg.rps, s.replica_count()};
    for (int w = 0; w < cfg.episode_windows; ++w) {
      const int n_before = s.replica_count();
      auto reqs = window_requests(cursor + 1 + w);
      const sim::WindowMetrics m = policy == "hpa"
                                       ? baselines::hpa_window(s, hpa_ctrl, std::move(reqs))
                                       : baselines::rps_window(s, rps_ctrl, std::move(reqs));

      WindowRow row;
      row.window = e * cfg.episode_windows + w;
      row.policy = policy;
      row.tau = m.tau_seconds;
      row.phi = m.phi;
      row.q = m.arrivals;
      row.n = m.replicas;
      row.c = m.cpu_util;
      row.m = m.mem_util;
      row.action = m.replicas - n_before;
      row.reward = env::reward_fn(m.phi, m.replicas, m.cpu_util, m.mem_util, true, cfg.reward);
      row.valid = 1;
      rows.push_back(std::move(row));
    }
  }

  return finish_run(cfg, policy, "baseline_" + policy + "_seed" + std::to_string(cfg.seed),
                    std::move(rows), schedule_digest(cfg, trace, sched),
                    seconds_since(start_time));
}

namespace {

struct LoadedRun {
  std::filesystem::path csv;
  RunMeta meta;
  RunSummary summary;  // recomputed from the rows, not trusted from the meta
};

std::string percent_delta(double a, double b) {
  if (b == 0.0) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.4f%%", (a - b) / b * 100.0);
  return buf;
}

}  // namespace

std::string run_compare(const std::vector<std::filesystem::path>& csvs) {
  require(csvs.size() >= 2, "compare: need at least two window CSVs");

  std::vector<LoadedRun> runs;
  for (const auto& path : csvs) {
    LoadedRun run;
    run.csv = path;
    run.meta = read_meta(meta_path_for(path));
    const auto rows = read_window_csv(path);
    run.summary = summarize_rows(rows, run.meta.episode_windows);
    run.summary.wall_clock_seconds = run.meta.summary.wall_clock_seconds;
    runs.push_back(std::move(run));
  }

  const auto& first = runs.front();
  for (const auto& run : runs) {
    if (run.summary.windows != first.summary.windows) {
      std::ostringstream msg;
      msg << "compare: window counts differ: " << first.csv.filename().string() << " has "
          << first.summary.windows << ", " << run.csv.filename().string() << " has "
          << run.summary.windows;
      throw ValidationError(msg.str());
    }
    if (run.meta.workload_hash != first.meta.workload_hash) {
      char a[19], b[19];
      std::snprintf(a, sizeof a, "0x%016llx",
                    static_cast<unsigned long long>(first.meta.workload_hash));
      std::snprintf(b, sizeof b, "0x%016llx",
                    static_cast<unsigned long long>(run.meta.workload_hash));
      throw ValidationError("compare: workload digests differ: " +
                            first.csv.filename().string() + " " + a + " vs " +
                            run.csv.filename().string() + " " + b +
                            " (runs replay different workloads and are not comparable)");
    }
  }

  std::ostringstream md;
  md << "# Autoscaling policy comparison\n\n";
  md << runs.size() << " runs, " << first.summary.windows << " windows ("
     << first.summary.episodes << " episodes) each, workload ";
  {
    char h[19];
    std::snprintf(h, sizeof h, "0x%016llx",
                  static_cast<unsigned long long>(first.meta.workload_hash));
    md << h << ".\n\n";
  }

  md << "| run | policy | episodic reward | throughput | replicas | exec time (s) | invalid | "
        "wall clock (s) |\n";
  md << "|---|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& run : runs) {
    const auto& s = run.summary;
    md << "| " << run.csv.filename().string() << " | " << s.policy << " | "
       << format_real(s.mean_episodic_reward) << " | " << format_real(s.mean_phi) << " | "
       << format_real(s.mean_replicas) << " | " << format_real(s.mean_exec_seconds) << " | "
       << s.invalid_actions << " | " << format_real(s.wall_clock_seconds) << " |\n";
  }

  md << "\n## Pairwise deltas\n\n";
  md << "Relative change of run A against run B, in percent of B.\n\n";
  md << "| A | B | throughput | replicas | exec time |\n";
  md << "|---|---|---:|---:|---:|\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      const auto& a = runs[i].summary;
      const auto& b = runs[j].summary;
      md << "| " << runs[i].csv.filename().string() << " | " << runs[j].csv.filename().string()
         << " | " << percent_delta(a.mean_phi, b.mean_phi) << " | "
         << percent_delta(a.mean_replicas, b.mean_replicas) << " | "
         << percent_delta(a.mean_exec_seconds, b.mean_exec_seconds) << " |\n";
    }
  }
  return md.str();
}

}  // namespace faaslab::cli
