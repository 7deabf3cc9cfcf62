#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "xpmarl/learner/mappo.hpp"
#include "xpmarl/pipeline.hpp"

namespace xpmarl {

struct TrainerOptions {
  PipelineWiring wiring;
  int k_obs = 2;
  SlotOrder slot_order = SlotOrder::Priority;
  PpoHyperparameters priority_hp;
  PpoHyperparameters decision_hp;
  long total_env_steps = 100'000;
  std::uint64_t seed = 0;
};

struct EpisodeRecord {
  long episode = 0;
  long env_steps = 0;  // cumulative, at episode end
  double team_return = 0.0;
  int length = 0;
};

struct UpdateRecord {
  int iteration = 0;
  long env_steps = 0;
  PpoDiagnostics decision;
  std::optional<PpoDiagnostics> priority;
};

struct TrainingCurve {
  std::vector<EpisodeRecord> episodes;
  std::vector<UpdateRecord> updates;
};

/// Joint learner for the priority-assignment and decision-making problems.
/// Both instances are fed the same team reward and are updated once per
/// rollout, priority instance first.
class BiStageTrainer {
 public:
  BiStageTrainer(const TeamEnv& env, TrainerOptions options);

  using RolloutObserver = std::function<void(const RolloutBuffer* priority, const RolloutBuffer& decision)>;
  using UpdateObserver = std::function<void(const UpdateRecord&)>;

  TrainingCurve train(TeamEnv& env, const UpdateObserver& on_update = {},
                      const RolloutObserver& on_rollout = {});

  PolicySet policies() const;
  SlotLayout slot_layout() const { return layout_; }
  const TrainerOptions& options() const { return options_; }

  MappoInstance* priority_instance() { return priority_ ? priority_.get() : nullptr; }
  const MappoInstance* priority_instance() const { return priority_ ? priority_.get() : nullptr; }
  MappoInstance& decision_instance() { return *decision_; }
  const MappoInstance& decision_instance() const { return *decision_; }

 private:
  TrainerOptions options_;
  int num_agents_;
  SlotLayout layout_;
  std::unique_ptr<MappoInstance> priority_;
  std::unique_ptr<MappoInstance> decision_;
};

}  // namespace xpmarl
