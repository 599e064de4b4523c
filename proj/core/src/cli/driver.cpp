#include "faaslab/cli/driver.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "faaslab/cli/runner.hpp"
#include "faaslab/common/error.hpp"
#include "faaslab/common/log.hpp"

namespace faaslab::cli {

namespace {

struct CommonFlags {
  std::string config_path;
  std::string agent;
  std::string out_dir;
  unsigned long long seed = 0;
  bool seed_set = false;
  long episodes = 0;
  bool episodes_set = false;
  long windows = 0;
  bool windows_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config JSON")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "override the config seed")
      ->each([&](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out", f.out_dir, "override the config output directory");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
  ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
  if (f.seed_set) cfg.seed = f.seed;
  if (f.episodes_set) cfg.episodes = f.episodes;
  if (f.windows_set) cfg.eval.windows = f.windows;
  if (!f.agent.empty()) cfg.agent.kind = f.agent;
  if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
  if (!out) throw ValidationError("short write to " + path);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"desk-scale serverless autoscaling lab"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, baseline_flags, config_flags;
  std::string checkpoint, baseline_policy, compare_out, config_out;
  std::vector<std::string> compare_csvs;

  CLI::App* train = app.add_subcommand("train", "train an agent on the leading trace split");
  add_common(train, train_flags);
  train->add_option("--agent", train_flags.agent, "agent kind: rppo, ppo, or drqn");
  train->add_option("--episodes", train_flags.episodes, "training episodes")
      ->each([&](const std::string&) { train_flags.episodes_set = true; });

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint greedily on held-out windows");
  add_common(eval, eval_flags);
  eval->add_option("--checkpoint", checkpoint, "checkpoint written by train")->required();
  eval->add_option("--windows", eval_flags.windows, "evaluation windows to run")
      ->each([&](const std::string&) { eval_flags.windows_set = true; });

  CLI::App* baseline = app.add_subcommand("baseline", "run a threshold controller on the same windows");
  add_common(baseline, baseline_flags);
  baseline->add_option("--policy", baseline_policy, "hpa or rps")->required();
  baseline->add_option("--windows", baseline_flags.windows, "evaluation windows to run")
      ->each([&](const std::string&) { baseline_flags.windows_set = true; });

  CLI::App* compare = app.add_subcommand("compare", "compare previously written window CSVs");
  compare->add_option("csvs", compare_csvs, "window CSV files")->required()->expected(-2);
  compare->add_option("--out", compare_out, "write the markdown report here instead of stdout");

  CLI::App* config = app.add_subcommand("config", "inspect experiment configuration");
  CLI::App* config_dump = config->add_subcommand("dump", "print the canonical config document");
  config_dump->add_option("--config", config_flags.config_path, "start from this file instead of defaults")
      ->check(CLI::ExistingFile);
  config_dump->add_option("--out", config_out, "write the document here instead of stdout");
  CLI::App* config_check = config->add_subcommand("check", "validate a config file");
  config_check->add_option("--config", config_flags.config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  config->require_subcommand(1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 consumes back-to-front
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad usage is a validation problem
  }

  try {
    if (train->parsed()) {
      const auto out = run_train(resolve_config(train_flags));
      std::cout << "episodes: " << out.episodes << "\n"
                << "episode_csv: " << out.episode_csv.string() << "\n"
                << "checkpoint: " << out.checkpoint.string() << "\n";
    } else if (eval->parsed()) {
      const auto out = run_eval(resolve_config(eval_flags), checkpoint);
      std::cout << "window_csv: " << out.window_csv.string() << "\n"
                << "meta: " << out.meta.string() << "\n"
                << "mean_throughput: " << format_real(out.summary.mean_phi) << "\n"
                << "mean_replicas: " << format_real(out.summary.mean_replicas) << "\n";
    } else if (baseline->parsed()) {
      const auto out = run_baseline(resolve_config(baseline_flags), baseline_policy);
      std::cout << "window_csv: " << out.window_csv.string() << "\n"
                << "meta: " << out.meta.string() << "\n"
                << "mean_throughput: " << format_real(out.summary.mean_phi) << "\n"
                << "mean_replicas: " << format_real(out.summary.mean_replicas) << "\n";
    } else if (compare->parsed()) {
      std::vector<std::filesystem::path> paths(compare_csvs.begin(), compare_csvs.end());
      const std::string report = run_compare(paths);
      if (compare_out.empty())
        std::cout << report;
      else
        write_text(compare_out, report);
    } else if (config->parsed()) {
      if (config_check->parsed()) {
        const auto cfg = load_config(config_flags.config_path);
        cfg.validate();
        std::cout << "ok\n";
      } else {
        const auto cfg = resolve_config(config_flags);
        cfg.validate();
        const std::string doc = dump_config(cfg);
        if (config_out.empty())
          std::cout << doc;
        else
          write_text(config_out, doc);
      }
    }
  } catch (const ValidationError& e) {
    log::error(e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log::error(e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace faaslab::cli
