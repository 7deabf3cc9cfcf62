#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "xpmarl/errors.hpp"
#include "xpmarl/harness/experiment.hpp"
#include "xpmarl/harness/report.hpp"
#include "xpmarl/oracles/suites.hpp"

namespace fs = std::filesystem;
using namespace xpmarl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitOracle = 3;

int cmd_train(const fs::path& config_path, const std::string& variant, std::uint64_t seed, fs::path out_dir) {
  ExperimentConfig config = load_config(config_path);
  if (!variant.empty()) config.variant = parse_variant(variant);
  if (out_dir.empty()) out_dir = fs::path("runs") / to_string(config.variant) / ("seed_" + std::to_string(seed));
  const auto out = run_training(config, seed, out_dir, [](const UpdateRecord& u) {
    std::fprintf(stderr, "update %d steps %ld policy_loss %.4f entropy %.4f clip %.3f\n", u.iteration, u.env_steps,
                 u.decision.policy_loss, u.decision.entropy, u.decision.clip_fraction);
  });
  const auto& eps = out.curve.episodes;
  std::printf("trained %s seed %llu: %zu episodes, %zu updates -> %s\n", to_string(config.variant).c_str(),
              static_cast<unsigned long long>(seed), eps.size(), out.curve.updates.size(),
              (out_dir / "checkpoint.json").string().c_str());
  return kExitOk;
}

int cmd_eval(const fs::path& checkpoint_path, const fs::path& scenario_path, int episodes, int agents, int horizon,
             fs::path out_dir) {
  const Checkpoint cp = load_checkpoint(checkpoint_path);
  EvaluationOptions opts;
  opts.episodes = episodes > 0 ? episodes : cp.config.eval_episodes;
  opts.horizon = horizon > 0 ? horizon : cp.config.eval_horizon;
  opts.num_agents = agents;
  if (!scenario_path.empty()) opts.scenario = load_scenario(scenario_path);
  if (out_dir.empty()) out_dir = checkpoint_path.parent_path() / "eval";
  const MetricsReport report = run_evaluation(cp, opts, out_dir);
  std::printf("%s: %zu episodes, median collision rate %.6f, median relative speed %.6f -> %s\n",
              report.variant.c_str(), report.episodes.size(), report.collision_rate.median,
              report.relative_average_speed.median, out_dir.string().c_str());
  return kExitOk;
}

int cmd_report(const fs::path& inputs, fs::path out_dir) {
  if (!fs::is_directory(inputs)) throw ConfigError("report inputs must be a directory: " + inputs.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(inputs)) {
    if (entry.is_regular_file() && entry.path().filename() == "metrics.csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, MetricsReport> merged;
  for (const auto& f : files) {
    MetricsReport r = read_metrics_csv(f);
    auto& m = merged[r.variant];
    m.variant = r.variant;
    m.episodes.insert(m.episodes.end(), r.episodes.begin(), r.episodes.end());
  }
  if (merged.empty()) throw ConfigError("no metrics.csv found under " + inputs.string());
  std::vector<MetricsReport> reports;
  for (auto& [name, r] : merged) {
    r.finalize();
    reports.push_back(std::move(r));
  }
  if (out_dir.empty()) out_dir = inputs;
  for (const auto& c : emit_report(reports, out_dir)) {
    std::printf("%-20s collision median %.6f (%+.1f%%)  speed median %.6f (%+.1f%%)\n", c.variant.c_str(),
                c.collision_rate.median, c.collision_improvement_pct, c.relative_average_speed.median,
                c.speed_change_pct);
  }
  return kExitOk;
}

int cmd_selftest(const std::vector<fs::path>& config_paths, double gradient_tolerance) {
  std::vector<ExperimentConfig> configs;
  for (const auto& p : config_paths) configs.push_back(load_config(p));
  bool ok = true;
  for (const auto& r : oracles::run_selftest_suites(configs, gradient_tolerance)) {
    std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prioritized sequential multi-agent PPO: training, evaluation and reporting"};
  app.require_subcommand(1);

  fs::path config_path;
  std::string variant;
  std::uint64_t seed = 0;
  fs::path train_out;
  auto* train = app.add_subcommand("train", "Train one variant for one seed");
  train->add_option("--config", config_path, "Experiment config (JSON)")->required();
  train->add_option("--variant", variant, "M1_xp, M2_vanilla, M3_opponent_model, M4_random_priority, M5_noisy_comm");
  train->add_option("--seed", seed, "Training seed");
  train->add_option("--out", train_out, "Output directory (default runs/<variant>/seed_<n>)");

  fs::path checkpoint_path;
  fs::path scenario_path;
  int episodes = 0;
  int agents = 0;
  int horizon = 0;
  fs::path eval_out;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with deterministic policies");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint.json from train")->required();
  eval->add_option("--scenario", scenario_path, "Scenario file (default: the training scenario)");
  eval->add_option("--episodes", episodes, "Number of evaluation episodes");
  eval->add_option("--agents", agents, "Number of agents (default: config eval_agents)");
  eval->add_option("--horizon", horizon, "Steps per episode (default: config eval_horizon)");
  eval->add_option("--out", eval_out, "Output directory (default: <checkpoint dir>/eval)");

  fs::path inputs;
  fs::path report_out;
  auto* report = app.add_subcommand("report", "Compare metrics.csv files found under a directory");
  report->add_option("--inputs", inputs, "Directory searched recursively for metrics.csv")->required();
  report->add_option("--out", report_out, "Output directory (default: --inputs)");

  std::vector<fs::path> selftest_configs;
  double gradient_tolerance = 1e-4;
  auto* selftest = app.add_subcommand("selftest", "Gradient checks and oracle suites");
  selftest->add_option("--config", selftest_configs, "Also gradient-check the networks of these configs");
  selftest->add_option("--gradient-tolerance", gradient_tolerance, "Maximum relative gradient error")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, variant, seed, train_out);
    if (eval->parsed()) return cmd_eval(checkpoint_path, scenario_path, episodes, agents, horizon, eval_out);
    if (report->parsed()) return cmd_report(inputs, report_out);
    if (selftest->parsed()) return cmd_selftest(selftest_configs, gradient_tolerance);
  } catch (const NumericalDivergence& e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
