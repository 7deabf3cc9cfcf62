#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "xpmarl/harness/checkpoint.hpp"
#include "xpmarl/harness/metrics.hpp"
#include "xpmarl/harness/trajectory_log.hpp"

namespace xpmarl {

struct TrainingOutput {
  Checkpoint checkpoint;
  TrainingCurve curve;
};

TrainerOptions trainer_options(const ExperimentConfig& config, std::uint64_t seed);

/// Trains the configured variant in memory.
TrainingOutput train_model(const ExperimentConfig& config, std::uint64_t seed,
                           const BiStageTrainer::UpdateObserver& on_update = {});

/// Trains and writes checkpoint.json, curve.csv and updates.csv into `out_dir`.
TrainingOutput run_training(const ExperimentConfig& config, std::uint64_t seed,
                            const std::filesystem::path& out_dir,
                            const BiStageTrainer::UpdateObserver& on_update = {});

/// episode,env_steps,team_return,smoothed_return (5-episode window).
void write_curve_csv(const TrainingCurve& curve, std::ostream& out);
void write_updates_csv(const TrainingCurve& curve, std::ostream& out);

struct EvaluationOptions {
  int episodes = 32;
  int horizon = 1200;
  int num_agents = 0;                 // 0: config eval_agents, else scenario default
  std::optional<Scenario> scenario;   // overrides the training scenario
  std::uint64_t seed_base = 1'000'000;
};

/// Runs deterministic (policy-mean) episodes; episode k resets with
/// seed_base + k. Rows are appended to `trajectory` when non-null.
/// Throws ConfigError when the scenario's observation width does not match the
/// checkpoint.
MetricsReport evaluate(const Checkpoint& checkpoint, const EvaluationOptions& options,
                       std::vector<TrajectoryRow>* trajectory = nullptr);

/// evaluate() plus metrics.csv and trajectory.csv in `out_dir`.
MetricsReport run_evaluation(const Checkpoint& checkpoint, const EvaluationOptions& options,
                             const std::filesystem::path& out_dir);

/// Recomputes per-episode metrics from trajectory rows alone.
std::vector<EpisodeMetrics> recount_metrics(const std::vector<TrajectoryRow>& rows, double v_max);

void write_metrics_csv(const MetricsReport& report, std::ostream& out);
MetricsReport read_metrics_csv(const std::filesystem::path& path);

/// Team reward of one deterministic episode from seed `seed`.
double greedy_episode_return(const Checkpoint& checkpoint, std::uint64_t seed = 0);

}  // namespace xpmarl
