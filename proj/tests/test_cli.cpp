#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "faaslab/cli/driver.hpp"
#include "faaslab/cli/experiment_config.hpp"
#include "faaslab/cli/run_csv.hpp"
#include "faaslab/cli/runner.hpp"
#include "faaslab/cli/summary.hpp"
#include "faaslab/common/error.hpp"
#include "faaslab/nn/checkpoint.hpp"

using namespace faaslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "faaslab_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

// Small but structurally complete experiment: 120-window flat-ish trace,
// one-layer PPO, four training episodes, two evaluation episodes.
cli::ExperimentConfig tiny_config(const fs::path& out_dir) {
  cli::ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.episodes = 4;
  cfg.checkpoint_every = 2;
  cfg.eval.windows = 20;
  cfg.workload.windows = 120;
  cfg.workload.scale = 6;
  cfg.agent.kind = "ppo";
  cfg.agent.ppo.hidden = {8};
  cfg.agent.ppo.steps_per_update = 20;
  cfg.output_dir = out_dir.string();
  return cfg;
}

}  // namespace

TEST_CASE("config document round-trips byte for byte") {
  const cli::ExperimentConfig defaults;
  const std::string once = cli::dump_config(defaults);
  const std::string twice = cli::dump_config(cli::parse_config(once));
  CHECK(once == twice);

  // and a non-default document too
  cli::ExperimentConfig cfg = tiny_config("runs");
  cfg.agent.kind = "drqn";
  cfg.q_norm = 12.5;
  cfg.workload.pattern = "bursty";
  const std::string a = cli::dump_config(cfg);
  CHECK(a == cli::dump_config(cli::parse_config(a)));
}

TEST_CASE("parsed fields land where they should") {
  cli::ExperimentConfig cfg = tiny_config("runs");
  cfg.agent.rppo.shared_lstm = true;
  cfg.agent.drqn.epsilon_decay_steps = 77;
  cfg.hpa.target_cpu = 0.6;
  cfg.rps.rps_threshold = 9.0;
  cfg.mix.p = {0.2, 0.3, 0.5};
  const auto back = cli::parse_config(cli::dump_config(cfg));
  CHECK(back.agent.rppo.shared_lstm == true);
  CHECK(back.agent.drqn.epsilon_decay_steps == 77);
  CHECK(back.hpa.target_cpu == 0.6);
  CHECK(back.rps.rps_threshold == 9.0);
  CHECK(back.mix.p[2] == 0.5);
  CHECK(back.eval.windows == 20);
  CHECK(back.agent.ppo.hidden == std::vector<int>{8});
}

TEST_CASE("unknown keys are rejected with their full path") {
  const std::string doc = cli::dump_config(cli::ExperimentConfig{});

  std::string bad = doc;
  bad.replace(bad.find("\"window_seconds\""), 16, "\"window_secondz\"");
  CHECK_THROWS_WITH_AS(cli::parse_config(bad),
                       doctest::Contains("sim.window_secondz"), ValidationError);

  std::string top = doc;
  top.insert(top.rfind('}'), ",\"extra\": 1\n");
  CHECK_THROWS_WITH_AS(cli::parse_config(top), doctest::Contains("extra"), ValidationError);
}

TEST_CASE("type and structure errors name the offending key") {
  const std::string doc = cli::dump_config(cli::ExperimentConfig{});

  std::string bad = doc;
  bad.replace(bad.find("\"episodes\": 200"), 15, "\"episodes\": \"x\"");
  CHECK_THROWS_WITH_AS(cli::parse_config(bad), doctest::Contains("episodes"), ValidationError);

  CHECK_THROWS_WITH_AS(cli::parse_config("{\"version\": 1}"), doctest::Contains("missing key"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(cli::parse_config("not json"), doctest::Contains("invalid JSON"),
                       ValidationError);
}

TEST_CASE("replica bounds are authored once under sim") {
  cli::ExperimentConfig cfg;
  cfg.sim.max_replicas = 10;
  cfg.reward.n_max = 10;  // keep the in-memory struct coherent for dumping
  const auto back = cli::parse_config(cli::dump_config(cfg));
  CHECK(back.reward.n_max == 10);
  CHECK(back.hpa.max_replicas == 10);
  CHECK(back.rps.max_replicas == 10);
}

TEST_CASE("validation guards the experiment shape") {
  const fs::path dir = scratch_dir("validate");
  cli::ExperimentConfig cfg = tiny_config(dir);

  cfg.episodes = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.episodes = 4;

  cfg.eval.windows = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.eval.windows = 15;  // not a whole number of 10-window episodes
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.eval.windows = 20;

  cfg.eval.split_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.eval.split_fraction = 0.8;

  cfg.workload.trace_path = (dir / "missing.csv").string();
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("missing.csv"), ValidationError);
  cfg.workload.trace_path.clear();

  cfg.agent.kind = "sarsa";
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.agent.kind = "ppo";

  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("window csv writes the exact schema") {
  const fs::path dir = scratch_dir("csv");
  std::vector<cli::WindowRow> rows;
  cli::WindowRow r;
  r.window = 0;
  r.policy = "rppo";
  r.tau = 1.23456789;
  r.phi = 0.5;
  r.q = 42;
  r.n = 7;
  r.c = 0.25;
  r.m = 1.0 / 3.0;
  r.action = -2;
  r.reward = -100.0;
  r.valid = 0;
  rows.push_back(r);

  const fs::path path = dir / "rows.csv";
  cli::write_window_csv(path, rows);
  const std::string text = slurp(path);
  CHECK(text ==
        "window,policy,tau,phi,q,n,c,m,action,reward,valid\n"
        "0,rppo,1.234568,0.500000,42,7,0.250000,0.333333,-2,-100.000000,0\n");
  CHECK(text.find('\r') == std::string::npos);

  const auto back = cli::read_window_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].policy == "rppo");
  CHECK(back[0].q == 42);
  CHECK(back[0].action == -2);
  CHECK(back[0].reward == -100.0);
  CHECK(back[0].valid == 0);
}

TEST_CASE("window csv reader rejects malformed files") {
  const fs::path dir = scratch_dir("csv_bad");

  spit(dir / "header.csv", "window,policy,tau\n");
  CHECK_THROWS_WITH_AS(cli::read_window_csv(dir / "header.csv"),
                       doctest::Contains("unexpected header"), ValidationError);

  spit(dir / "cols.csv", std::string(cli::kWindowCsvHeader) + "\n1,p,0.0\n");
  CHECK_THROWS_WITH_AS(cli::read_window_csv(dir / "cols.csv"), doctest::Contains("columns"),
                       ValidationError);

  spit(dir / "num.csv", std::string(cli::kWindowCsvHeader) +
                            "\nx,p,0.0,0.0,0,1,0.0,0.0,0,0.0,1\n");
  CHECK_THROWS_WITH_AS(cli::read_window_csv(dir / "num.csv"), doctest::Contains("integer"),
                       ValidationError);

  CHECK_THROWS_AS(cli::read_window_csv(dir / "absent.csv"), ValidationError);
}

TEST_CASE("episode csv round-trips") {
  const fs::path dir = scratch_dir("episode_csv");
  std::vector<cli::EpisodeRow> rows(2);
  rows[0] = {0, 11, -3.5, 0.9, 2.4, 1.25, 1};
  rows[1] = {1, 22, 4.0, 1.0, 3.0, 0.0, 0};
  const fs::path path = dir / "eps.csv";
  cli::write_episode_csv(path, rows);
  CHECK(slurp(path) ==
        "episode,cursor,reward,phi,replicas,tau,invalid\n"
        "0,11,-3.500000,0.900000,2.400000,1.250000,1\n"
        "1,22,4.000000,1.000000,3.000000,0.000000,0\n");
  const auto back = cli::read_episode_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].reward == 4.0);
  CHECK(back[0].invalid == 1);
}

TEST_CASE("run summary is an exact function of the rows") {
  std::vector<cli::WindowRow> rows;
  for (int i = 0; i < 20; ++i) {
    cli::WindowRow r;
    r.window = i;
    r.policy = "hpa";
    r.phi = (i % 2 == 0) ? 1.0 : 0.5;
    r.n = 1 + i % 4;
    r.tau = (i < 5) ? 0.0 : 2.0;  // five windows completed nothing
    r.reward = 1.5;
    r.valid = (i == 3 || i == 7) ? 0 : 1;
    rows.push_back(r);
  }
  const auto s = cli::summarize_rows(rows, 10);
  CHECK(s.policy == "hpa");
  CHECK(s.windows == 20);
  CHECK(s.episodes == 2);
  CHECK(s.mean_episodic_reward == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(s.mean_phi == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.mean_replicas == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(s.mean_exec_seconds == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.invalid_actions == 2);

  rows.pop_back();
  CHECK_THROWS_AS(cli::summarize_rows(rows, 10), ValidationError);
  CHECK_THROWS_AS(cli::summarize_rows({}, 10), ValidationError);
}

TEST_CASE("workload digest separates traces, seeds, and regions") {
  const std::vector<long> a{1, 2, 3, 4};
  std::vector<long> b = a;
  const auto base = cli::workload_digest(a, 9, "eval");
  CHECK(base == cli::workload_digest(a, 9, "eval"));
  b[2] = 5;
  CHECK(base != cli::workload_digest(b, 9, "eval"));
  CHECK(base != cli::workload_digest(a, 10, "eval"));
  CHECK(base != cli::workload_digest(a, 9, "train"));
}

TEST_CASE("meta sidecar round-trips") {
  const fs::path dir = scratch_dir("meta");
  cli::RunMeta meta;
  meta.policy = "rps";
  meta.seed = 1234567890123ULL;
  meta.windows = 200;
  meta.episode_windows = 10;
  meta.workload_hash = 0xdeadbeefcafef00dULL;
  meta.summary.policy = "rps";
  meta.summary.windows = 200;
  meta.summary.episodes = 20;
  meta.summary.mean_episodic_reward = -1.5;
  meta.summary.mean_phi = 0.875;
  meta.summary.mean_replicas = 1.0;
  meta.summary.mean_exec_seconds = 3.25;
  meta.summary.invalid_actions = 0;
  meta.summary.wall_clock_seconds = 12.5;

  const fs::path path = cli::meta_path_for(dir / "run.csv");
  CHECK(path.filename() == "run.meta.json");
  cli::write_meta(path, meta);
  const auto back = cli::read_meta(path);
  CHECK(back.policy == "rps");
  CHECK(back.seed == meta.seed);
  CHECK(back.workload_hash == meta.workload_hash);
  CHECK(back.summary.mean_phi == meta.summary.mean_phi);
  CHECK(back.summary.wall_clock_seconds == 12.5);
}

TEST_CASE("training twice with one seed writes identical artifacts") {
  const fs::path a = scratch_dir("train_a");
  const fs::path b = scratch_dir("train_b");

  const auto out_a = cli::run_train(tiny_config(a));
  const auto out_b = cli::run_train(tiny_config(b));
  CHECK(out_a.episodes == 4);
  CHECK(slurp(out_a.episode_csv) == slurp(out_b.episode_csv));
  CHECK(slurp(out_a.checkpoint) == slurp(out_b.checkpoint));

  const auto rows = cli::read_episode_csv(out_a.episode_csv);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].episode == static_cast<long>(i));
    CHECK(rows[i].cursor == static_cast<long>(11 * i));  // stride walk over the split
  }
}

TEST_CASE("a feed-forward checkpoint carries no recurrent tensors") {
  const fs::path dir = scratch_dir("manifest");
  const auto out = cli::run_train(tiny_config(dir));
  const auto manifest = nn::read_checkpoint_manifest(out.checkpoint);
  CHECK(manifest.kind == "ppo");
  CHECK(!manifest.tensors.empty());
  for (const auto& t : manifest.tensors) {
    CAPTURE(t.name);
    CHECK(t.name.find("lstm") == std::string::npos);
  }

  cli::ExperimentConfig rcfg = tiny_config(dir);
  rcfg.agent.kind = "rppo";
  rcfg.agent.rppo.lstm_hidden = 4;
  rcfg.agent.rppo.head_hidden = {4};
  rcfg.agent.rppo.episodes_per_update = 2;
  rcfg.episodes = 2;
  const auto rout = cli::run_train(rcfg);
  const auto rmanifest = nn::read_checkpoint_manifest(rout.checkpoint);
  CHECK(rmanifest.kind == "rppo");
  bool has_lstm = false;
  for (const auto& t : rmanifest.tensors) has_lstm |= t.name.find("lstm") != std::string::npos;
  CHECK(has_lstm);
}

TEST_CASE("evaluation emits one row per requested window, reproducibly") {
  const fs::path dir = scratch_dir("eval");
  cli::ExperimentConfig cfg = tiny_config(dir);
  const auto trained = cli::run_train(cfg);

  const auto out = cli::run_eval(cfg, trained.checkpoint);
  const auto rows = cli::read_window_csv(out.window_csv);
  REQUIRE(static_cast<long>(rows.size()) == cfg.eval.windows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].window == static_cast<long>(i));
    CHECK(rows[i].policy == "ppo");
  }

  // summary numbers are exactly the column means of the emitted file
  double phi_sum = 0.0;
  for (const auto& r : rows) phi_sum += r.phi;
  CHECK(out.summary.mean_phi == phi_sum / 20.0);

  // the digest covers exactly the replayed slice of the trace
  const auto trace = cli::build_trace(cfg);
  const long start = cli::eval_start_window(cfg, trace);
  CHECK(start == 96);
  const std::span<const long> slice(trace.counts.data() + start, 22);
  const auto meta = cli::read_meta(out.meta);
  CHECK(meta.workload_hash == cli::workload_digest(slice, cfg.seed, "eval"));

  // identical seeds, identical bytes
  const fs::path dir2 = scratch_dir("eval2");
  cli::ExperimentConfig cfg2 = tiny_config(dir2);
  cli::run_train(cfg2);
  const auto out2 = cli::run_eval(cfg2, dir2 / "ppo_seed5.ckpt");
  CHECK(slurp(out.window_csv) == slurp(out2.window_csv));
}

TEST_CASE("evaluation rejects bad checkpoints with a pointed message") {
  const fs::path dir = scratch_dir("eval_bad");
  cli::ExperimentConfig cfg = tiny_config(dir);
  const auto trained = cli::run_train(cfg);

  CHECK_THROWS_AS(cli::run_eval(cfg, dir / "nope.ckpt"), ValidationError);

  // flip one payload byte: the trailing digest no longer matches
  std::string bytes = slurp(trained.checkpoint);
  bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x40);
  const fs::path corrupted = dir / "corrupted.ckpt";
  spit(corrupted, bytes);
  CHECK_THROWS_WITH_AS(cli::run_eval(cfg, corrupted), doctest::Contains("checksum"),
                       TrainingError);

  // a config whose network shape disagrees with the stored tensors
  cli::ExperimentConfig mismatched = cfg;
  mismatched.agent.ppo.hidden = {6};
  CHECK_THROWS_WITH_AS(cli::run_eval(mismatched, trained.checkpoint),
                       doctest::Contains("tensor"), TrainingError);
}

TEST_CASE("the rps baseline starves on the default request profile") {
  const fs::path dir = scratch_dir("baseline_rps");
  cli::ExperimentConfig cfg = tiny_config(dir);

  const auto out = cli::run_baseline(cfg, "rps");
  const auto rows = cli::read_window_csv(out.window_csv);
  REQUIRE(static_cast<long>(rows.size()) == cfg.eval.windows);
  for (const auto& r : rows) {
    CHECK(r.n == 1);  // one warm replica can never clear 5 completions/s
    CHECK(r.policy == "rps");
    CHECK(r.valid == 1);
  }
  CHECK(out.summary.mean_replicas == 1.0);

  CHECK_THROWS_WITH_AS(cli::run_baseline(cfg, "vpa"), doctest::Contains("vpa"), ValidationError);
}

TEST_CASE("agent and baseline runs replay the same arrival stream") {
  const fs::path dir = scratch_dir("parity");
  cli::ExperimentConfig cfg = tiny_config(dir);
  const auto trained = cli::run_train(cfg);

  const auto eval_rows = cli::read_window_csv(cli::run_eval(cfg, trained.checkpoint).window_csv);
  const auto hpa_rows = cli::read_window_csv(cli::run_baseline(cfg, "hpa").window_csv);
  REQUIRE(eval_rows.size() == hpa_rows.size());
  for (std::size_t i = 0; i < eval_rows.size(); ++i) {
    CHECK(eval_rows[i].q == hpa_rows[i].q);  // same sampled arrivals per window
  }
}

TEST_CASE("comparing a run with itself reports all-zero deltas") {
  const fs::path dir = scratch_dir("compare_self");
  cli::ExperimentConfig cfg = tiny_config(dir);
  const auto out = cli::run_baseline(cfg, "rps");

  const std::string report = cli::run_compare({out.window_csv, out.window_csv});
  CHECK(report.find("# Autoscaling policy comparison") == 0);
  CHECK(report.find("+0.0000%") != std::string::npos);
  CHECK(report.find("-0.0000%") == std::string::npos);
  // one pair, three delta cells, all zero
  std::size_t zeros = 0;
  for (std::size_t pos = report.find("+0.0000%"); pos != std::string::npos;
       pos = report.find("+0.0000%", pos + 1))
    ++zeros;
  CHECK(zeros == 3);
}

TEST_CASE("compare refuses runs that are not comparable") {
  const fs::path dir = scratch_dir("compare_bad");
  cli::ExperimentConfig cfg = tiny_config(dir);
  const auto rps = cli::run_baseline(cfg, "rps");

  // different window count
  cli::ExperimentConfig shorter = cfg;
  shorter.eval.windows = 10;
  shorter.output_dir = (dir / "short").string();
  const auto small = cli::run_baseline(shorter, "rps");
  CHECK_THROWS_WITH_AS(cli::run_compare({rps.window_csv, small.window_csv}),
                       doctest::Contains("window counts differ"), ValidationError);

  // different seed means a different realized workload
  cli::ExperimentConfig reseeded = cfg;
  reseeded.seed = 6;
  reseeded.output_dir = (dir / "reseeded").string();
  const auto other = cli::run_baseline(reseeded, "rps");
  CHECK_THROWS_WITH_AS(cli::run_compare({rps.window_csv, other.window_csv}),
                       doctest::Contains("workload digests differ"), ValidationError);

  CHECK_THROWS_AS(cli::run_compare({rps.window_csv}), ValidationError);
}

TEST_CASE("the command line maps failures onto exit codes") {
  const fs::path dir = scratch_dir("exit_codes");
  const fs::path cfg_path = dir / "experiment.json";
  cli::ExperimentConfig cfg = tiny_config(dir / "out");
  spit(cfg_path, cli::dump_config(cfg));

  // 0: success
  const fs::path dumped = dir / "dumped.json";
  CHECK(cli::run_cli({"config", "dump", "--out", dumped.string()}) == 0);
  CHECK(slurp(dumped) == cli::dump_config(cli::ExperimentConfig{}));
  CHECK(cli::run_cli({"config", "check", "--config", cfg_path.string()}) == 0);
  CHECK(cli::run_cli({"train", "--config", cfg_path.string()}) == 0);

  // 2: validation problems
  CHECK(cli::run_cli({"train", "--config", cfg_path.string(), "--episodes", "0"}) == 2);
  CHECK(cli::run_cli({"train", "--config", cfg_path.string(), "--agent", "sarsa"}) == 2);
  CHECK(cli::run_cli({"eval", "--config", cfg_path.string(), "--checkpoint",
                      (dir / "absent.ckpt").string()}) == 2);
  CHECK(cli::run_cli({"baseline", "--config", cfg_path.string(), "--policy", "vpa"}) == 2);
  CHECK(cli::run_cli({"frobnicate"}) == 2);
  CHECK(cli::run_cli({"train", "--no-such-flag"}) == 2);

  // 3: runtime failures (corrupted checkpoint)
  const fs::path ckpt = dir / "out" / "ppo_seed5.ckpt";
  std::string bytes = slurp(ckpt);
  bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x01);
  const fs::path corrupted = dir / "corrupted.ckpt";
  spit(corrupted, bytes);
  CHECK(cli::run_cli({"eval", "--config", cfg_path.string(), "--checkpoint",
                      corrupted.string()}) == 3);
}
