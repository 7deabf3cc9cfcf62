#pragma once

#include <cstdint>
#include <optional>

#include "xpmarl/learner/policy.hpp"
#include "xpmarl/prioritization.hpp"
#include "xpmarl/propagation.hpp"

namespace xpmarl {

enum class PrioritySource { None, Learned, Random };
enum class SlotSource { Empty, Propagated, Predicted };

/// How one environment step turns observations into a joint action.
struct PipelineWiring {
  PrioritySource priority = PrioritySource::Learned;
  SlotSource slots = SlotSource::Propagated;
  NoiseSpec noise;

  bool learns_priorities() const { return priority == PrioritySource::Learned; }
  bool sequential() const { return slots == SlotSource::Propagated; }
};

struct PolicySet {
  const Actor* priority = nullptr;  // required iff priorities are learned
  const Actor* decision = nullptr;
};

/// Independent random streams consumed by a step: action sampling, random
/// ranks and communication noise.
struct StepStreams {
  Rng policy;
  Rng rank;
  Rng noise;

  explicit StepStreams(std::uint64_t seed);
};

struct StepDecision {
  PriorityRank rank;  // identity when the wiring has no priorities
  std::optional<PriorityAssignment> priority;
  DecisionOutcome decision;

  /// Flattened modified observations by AgentId (the decision actor inputs).
  JointObservation decision_inputs() const;
};

StepDecision decide_step(const PipelineWiring& wiring, const JointObservation& obs,
                         const ObservableSets& obs_sets, const PolicySet& policies,
                         const SlotLayout& layout, ActMode mode, StepStreams& streams);

}  // namespace xpmarl
