#include "xpmarl/harness/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "xpmarl/errors.hpp"

namespace xpmarl {

TrainerOptions trainer_options(const ExperimentConfig& config, std::uint64_t seed) {
  TrainerOptions opts;
  opts.wiring = wire_variant(config.variant, config.noise);
  opts.k_obs = config.k_obs;
  opts.slot_order = config.slot_order;
  opts.priority_hp = config.priority_learner;
  opts.decision_hp = config.decision_learner;
  opts.total_env_steps = config.train_env_steps;
  opts.seed = seed;
  return opts;
}

TrainingOutput train_model(const ExperimentConfig& config, std::uint64_t seed,
                           const BiStageTrainer::UpdateObserver& on_update) {
  auto env = make_env(config.scenario, config.train_agents, config.train_horizon, config.k_obs);
  BiStageTrainer trainer(*env, trainer_options(config, seed));
  TrainingCurve curve = trainer.train(*env, on_update);
  return TrainingOutput{make_checkpoint(trainer, config, seed, env->obs_dim(), Rng(seed).derive(4)),
                        std::move(curve)};
}

TrainingOutput run_training(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir,
                            const BiStageTrainer::UpdateObserver& on_update) {
  TrainingOutput out = train_model(config, seed, on_update);
  std::filesystem::create_directories(out_dir);
  save_checkpoint(out.checkpoint, out_dir / "checkpoint.json");
  std::ofstream curve(out_dir / "curve.csv");
  write_curve_csv(out.curve, curve);
  std::ofstream updates(out_dir / "updates.csv");
  write_updates_csv(out.curve, updates);
  if (!curve || !updates) throw ConfigError("cannot write training outputs into " + out_dir.string());
  return out;
}

void write_curve_csv(const TrainingCurve& curve, std::ostream& out) {
  std::vector<double> returns;
  returns.reserve(curve.episodes.size());
  for (const auto& e : curve.episodes) returns.push_back(e.team_return);
  const auto smoothed = sliding_window_mean(returns, 5);
  out << "episode,env_steps,team_return,smoothed_return\n";
  for (std::size_t i = 0; i < curve.episodes.size(); ++i) {
    const auto& e = curve.episodes[i];
    out << e.episode << ',' << e.env_steps << ',' << format_double(e.team_return) << ','
        << format_double(smoothed[i]) << '\n';
  }
}

namespace {

void write_diag(std::ostream& out, const PpoDiagnostics& d) {
  out << format_double(d.policy_loss) << ',' << format_double(d.value_loss) << ',' << format_double(d.entropy) << ','
      << format_double(d.clip_fraction) << ',' << format_double(d.approx_kl) << ','
      << format_double(d.policy_grad_norm);
}

}  // namespace

void write_updates_csv(const TrainingCurve& curve, std::ostream& out) {
  out << "iteration,env_steps,"
         "decision_policy_loss,decision_value_loss,decision_entropy,decision_clip_fraction,decision_approx_kl,"
         "decision_grad_norm,"
         "priority_policy_loss,priority_value_loss,priority_entropy,priority_clip_fraction,priority_approx_kl,"
         "priority_grad_norm\n";
  for (const auto& u : curve.updates) {
    out << u.iteration << ',' << u.env_steps << ',';
    write_diag(out, u.decision);
    out << ',';
    if (u.priority) {
      write_diag(out, *u.priority);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

namespace {

struct EpisodeOutcome {
  EpisodeMetrics metrics;
  double team_return = 0.0;
};

EpisodeOutcome run_episode(const Checkpoint& cp, TeamEnv& env, int episode, std::uint64_t seed,
                           std::vector<TrajectoryRow>* trajectory) {
  const PipelineWiring wiring = cp.wiring();
  const PolicySet policies = cp.policies();
  StepStreams streams(seed);
  JointObservation obs = env.reset(seed);
  const double v_max = env.max_speed();
  const std::size_t n = static_cast<std::size_t>(env.num_agents());

  EpisodeOutcome out;
  out.metrics.train_seed = cp.seed;
  out.metrics.episode = episode;
  out.metrics.eval_seed = seed;
  double speed_sum = 0.0;
  bool done = false;
  int step = 0;
  while (!done) {
    const ObservableSets obs_sets = env.observable_sets(cp.layout.k_obs);
    const StepDecision d = decide_step(wiring, obs, obs_sets, policies, cp.layout, ActMode::Mean, streams);
    StepResult result = env.step(d.decision.joint_action);
    done = result.done || step + 1 >= env.max_episode_steps();
    const auto tel = env.telemetry();
    bool any_collision = false;
    for (std::size_t i = 0; i < n; ++i) {
      any_collision = any_collision || tel[i].in_collision;
      speed_sum += tel[i].speed / v_max;
      if (trajectory) {
        const AgentId id = AgentId::from_index(i);
        TrajectoryRow row;
        row.episode = episode;
        row.step = step;
        row.agent_id = id.value();
        row.rank_position = static_cast<int>(d.rank.position_of(id)) + 1;
        row.score = d.priority ? d.priority->scores[i] : 0.0;
        for (AgentId from : d.decision.contributors[i]) row.propagated_from.push_back(from.value());
        row.noise_applied = d.decision.noise_applied[i];
        row.x = tel[i].x;
        row.y = tel[i].y;
        row.speed = tel[i].speed;
        row.in_collision = tel[i].in_collision;
        row.team_reward = result.team_reward;
        trajectory->push_back(std::move(row));
      }
    }
    if (any_collision) ++out.metrics.collision_steps;
    out.team_return += result.team_reward;
    obs = std::move(result.observation);
    ++step;
  }
  out.metrics.steps = step;
  out.metrics.collision_rate = static_cast<double>(out.metrics.collision_steps) / step;
  out.metrics.relative_average_speed = speed_sum / (static_cast<double>(step) * static_cast<double>(n));
  return out;
}

void check_compatible(const Checkpoint& cp, const TeamEnv& env) {
  if (env.obs_dim() != cp.obs_dim || env.action_spec().encoded_dim() != cp.layout.encoded_action_dim) {
    throw ConfigError("scenario observation width " + std::to_string(env.obs_dim()) +
                      " does not match the checkpoint's " + std::to_string(cp.obs_dim));
  }
}

}  // namespace

MetricsReport evaluate(const Checkpoint& checkpoint, const EvaluationOptions& options,
                       std::vector<TrajectoryRow>* trajectory) {
  if (options.episodes < 1) throw ConfigError("evaluation needs at least one episode");
  const Scenario& scenario = options.scenario ? *options.scenario : checkpoint.config.scenario;
  const int agents = options.num_agents > 0 ? options.num_agents : checkpoint.config.eval_agents;
  auto env = make_env(scenario, agents, options.horizon, checkpoint.layout.k_obs);
  check_compatible(checkpoint, *env);

  MetricsReport report;
  report.variant = to_string(checkpoint.config.variant);
  for (int k = 0; k < options.episodes; ++k) {
    report.episodes.push_back(
        run_episode(checkpoint, *env, k, options.seed_base + static_cast<std::uint64_t>(k), trajectory).metrics);
  }
  report.finalize();
  return report;
}

MetricsReport run_evaluation(const Checkpoint& checkpoint, const EvaluationOptions& options,
                             const std::filesystem::path& out_dir) {
  std::vector<TrajectoryRow> rows;
  MetricsReport report = evaluate(checkpoint, options, &rows);
  std::filesystem::create_directories(out_dir);
  std::ofstream metrics(out_dir / "metrics.csv");
  write_metrics_csv(report, metrics);
  std::ofstream traj(out_dir / "trajectory.csv");
  traj << kTrajectoryHeader << '\n';
  for (const auto& r : rows) write_trajectory_row(traj, r);
  if (!metrics || !traj) throw ConfigError("cannot write evaluation outputs into " + out_dir.string());
  return report;
}

std::vector<EpisodeMetrics> recount_metrics(const std::vector<TrajectoryRow>& rows, double v_max) {
  struct Acc {
    std::map<int, bool> collision_by_step;
    double speed = 0.0;
    long samples = 0;
  };
  std::map<int, Acc> by_episode;
  for (const auto& r : rows) {
    Acc& a = by_episode[r.episode];
    bool& c = a.collision_by_step[r.step];
    c = c || r.in_collision;
    a.speed += r.speed / v_max;
    ++a.samples;
  }
  std::vector<EpisodeMetrics> out;
  for (const auto& [episode, a] : by_episode) {
    EpisodeMetrics m;
    m.episode = episode;
    m.steps = static_cast<long>(a.collision_by_step.size());
    m.collision_steps = std::count_if(a.collision_by_step.begin(), a.collision_by_step.end(),
                                      [](const auto& kv) { return kv.second; });
    m.collision_rate = static_cast<double>(m.collision_steps) / static_cast<double>(m.steps);
    m.relative_average_speed = a.speed / static_cast<double>(a.samples);
    out.push_back(m);
  }
  return out;
}

void write_metrics_csv(const MetricsReport& report, std::ostream& out) {
  out << "variant,train_seed,episode,eval_seed,steps,collision_steps,collision_rate,relative_average_speed\n";
  for (const auto& e : report.episodes) {
    out << report.variant << ',' << e.train_seed << ',' << e.episode << ',' << e.eval_seed << ',' << e.steps << ','
        << e.collision_steps << ',' << format_double(e.collision_rate) << ','
        << format_double(e.relative_average_speed) << '\n';
  }
}

MetricsReport read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("variant,train_seed,", 0) != 0) throw ConfigError(path.string() + " is not a metrics file");
  MetricsReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw ConfigError("malformed metrics row in " + path.string());
    try {
      if (report.variant.empty()) report.variant = f[0];
      if (f[0] != report.variant) throw ConfigError(path.string() + " mixes variants");
      EpisodeMetrics e;
      e.train_seed = std::stoull(f[1]);
      e.episode = std::stoi(f[2]);
      e.eval_seed = std::stoull(f[3]);
      e.steps = std::stol(f[4]);
      e.collision_steps = std::stol(f[5]);
      e.collision_rate = std::stod(f[6]);
      e.relative_average_speed = std::stod(f[7]);
      report.episodes.push_back(e);
    } catch (const std::logic_error&) {
      throw ConfigError("malformed number in " + path.string());
    }
  }
  report.finalize();
  return report;
}

double greedy_episode_return(const Checkpoint& checkpoint, std::uint64_t seed) {
  const auto& cfg = checkpoint.config;
  auto env = make_env(cfg.scenario, cfg.train_agents, cfg.train_horizon, checkpoint.layout.k_obs);
  check_compatible(checkpoint, *env);
  return run_episode(checkpoint, *env, 0, seed, nullptr).team_return;
}

}  // namespace xpmarl
