#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xpmarl/pomg.hpp"
#include "xpmarl/prioritization.hpp"

namespace xpmarl {

/// Communication noise on propagated actions. Each dimension of a communicated
/// copy receives Normal(0, variance_fraction * max|action|) noise.
struct NoiseSpec {
  double variance_fraction = 0.0;
  bool active() const { return variance_fraction > 0.0; }
};

/// Priority: contributors packed from slot 1 in descending priority.
/// Neighbor: slot k belongs to the k-th entry of the observable set, so it
/// lines up with that neighbor's block in the base observation.
enum class SlotOrder { Priority, Neighbor };

std::string to_string(SlotOrder order);
/// "priority" or "neighbor"; throws ConfigError otherwise.
SlotOrder parse_slot_order(std::string_view text);

/// Fixed-width encoding of propagated actions: k_obs slots of
/// (encoded action, presence flag).
struct SlotLayout {
  int k_obs = 2;
  std::size_t encoded_action_dim = 0;
  SlotOrder order = SlotOrder::Priority;
  std::size_t slot_width() const { return encoded_action_dim + 1; }
  std::size_t width() const { return static_cast<std::size_t>(k_obs) * slot_width(); }
};

struct PropagatedActionSlot {
  Vector action;  // all zeros when absent
  bool present = false;
};

/// Base observation followed by k_obs propagated-action slots.
struct ModifiedObservation {
  Vector base;
  std::vector<PropagatedActionSlot> slots;

  std::size_t dim() const;
  Vector flatten() const;
};

/// An action communicated by `from`, already in encoded form.
struct PropagatedAction {
  AgentId from;
  Vector encoded_action;
};

/// {j : j precedes `agent` in `rank`} intersected with `obs_set`, in rank order.
std::vector<AgentId> observable_higher_priority(const PriorityRank& rank, AgentId agent,
                                                std::span<const AgentId> obs_set);

/// Fills slots in the layout's order; unused slots stay zero with flag 0. Throws InvalidArgument when a contributor is outside
/// `obs_set` or more than k_obs actions are given.
ModifiedObservation build_modified_observation(std::span<const double> base,
                                               std::span<const PropagatedAction> propagated,
                                               std::span<const AgentId> obs_set,
                                               const PriorityRank& rank, const SlotLayout& layout);

/// Fills slots in the given order (used for the empty and predicted layouts).
ModifiedObservation fill_slots(std::span<const double> base, std::span<const PropagatedAction> ordered,
                               const SlotLayout& layout);

Vector inject_noise(std::span<const double> action, const NoiseSpec& spec,
                    std::span<const double> action_max_abs, Rng& rng);

/// Samples an action from the decision policy given a flattened ModifiedObservation.
using DecisionPolicy = std::function<ActionSample(std::span<const double>, Rng&)>;
/// Deterministic policy mean for a flattened ModifiedObservation.
using MeanPolicy = std::function<Vector(std::span<const double>)>;

struct DecisionOutcome {
  JointAction joint_action;                        // by AgentId
  std::vector<ActionSample> samples;               // by AgentId
  std::vector<ModifiedObservation> modified;       // by AgentId
  std::vector<std::vector<AgentId>> contributors;  // by AgentId, slot order
  std::vector<bool> noise_applied;                 // by AgentId
  std::vector<AgentId> acting_order;
};

/// Agents act in rank order; each one sees its own observation plus the
/// (possibly noisy) actions of its observable higher-priority agents taken
/// earlier in the same step. Executed actions are never perturbed.
DecisionOutcome sequential_decide(const PriorityRank& rank, const JointObservation& obs_d,
                                  const DecisionPolicy& policy, const ObservableSets& obs_sets,
                                  const ActionSpec& action_spec, const SlotLayout& layout,
                                  const NoiseSpec& noise, Rng& policy_rng, Rng& noise_rng);

/// Perfect opponent modeling: the action `agent` expects from each of its
/// observable agents, obtained by evaluating its own (shared) policy mean on
/// their observations with empty slots. Returned in obs_set order.
std::vector<PropagatedAction> predict_opponent_actions(AgentId agent, const JointObservation& obs_d,
                                                       std::span<const AgentId> obs_set,
                                                       const MeanPolicy& own_policy,
                                                       const ActionSpec& action_spec,
                                                       const SlotLayout& layout);

enum class SimultaneousSlots { Empty, Predicted };

/// All agents act at once. Slots are left empty, or filled with predictions
/// of the observable agents' actions.
DecisionOutcome simultaneous_decide(const JointObservation& obs_d, const DecisionPolicy& policy,
                                    SimultaneousSlots slots, const MeanPolicy& predictor,
                                    const ObservableSets& obs_sets, const ActionSpec& action_spec,
                                    const SlotLayout& layout, Rng& policy_rng);

}  // namespace xpmarl
