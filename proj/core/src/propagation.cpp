#include "xpmarl/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "xpmarl/errors.hpp"

namespace xpmarl {

std::size_t ModifiedObservation::dim() const {
  std::size_t d = base.size();
  for (const auto& slot : slots) d += slot.action.size() + 1;
  return d;
}

Vector ModifiedObservation::flatten() const {
  Vector out;
  out.reserve(dim());
  out.insert(out.end(), base.begin(), base.end());
  for (const auto& slot : slots) {
    out.insert(out.end(), slot.action.begin(), slot.action.end());
    out.push_back(slot.present ? 1.0 : 0.0);
  }
  return out;
}

std::string to_string(SlotOrder order) { return order == SlotOrder::Priority ? "priority" : "neighbor"; }

SlotOrder parse_slot_order(std::string_view text) {
  if (text == "priority") return SlotOrder::Priority;
  if (text == "neighbor") return SlotOrder::Neighbor;
  throw ConfigError("unknown slot order '" + std::string(text) + "' (expected priority or neighbor)");
}

std::vector<AgentId> observable_higher_priority(const PriorityRank& rank, AgentId agent,
                                                std::span<const AgentId> obs_set) {
  const std::size_t k = rank.position_of(agent);
  std::vector<AgentId> out;
  for (std::size_t p = 0; p < k; ++p) {
    const AgentId j = rank[p];
    if (std::find(obs_set.begin(), obs_set.end(), j) != obs_set.end()) out.push_back(j);
  }
  return out;
}

ModifiedObservation fill_slots(std::span<const double> base, std::span<const PropagatedAction> ordered,
                               const SlotLayout& layout) {
  if (ordered.size() > static_cast<std::size_t>(layout.k_obs)) {
    throw InvalidArgument("received " + std::to_string(ordered.size()) +
                          " propagated actions but only " + std::to_string(layout.k_obs) +
                          " slots exist");
  }
  ModifiedObservation out;
  out.base.assign(base.begin(), base.end());
  out.slots.resize(static_cast<std::size_t>(layout.k_obs));
  for (auto& slot : out.slots) slot.action.assign(layout.encoded_action_dim, 0.0);
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    if (ordered[k].encoded_action.size() != layout.encoded_action_dim) {
      throw InvalidArgument("propagated action has the wrong width");
    }
    out.slots[k].action = ordered[k].encoded_action;
    out.slots[k].present = true;
  }
  return out;
}

ModifiedObservation build_modified_observation(std::span<const double> base,
                                               std::span<const PropagatedAction> propagated,
                                               std::span<const AgentId> obs_set,
                                               const PriorityRank& rank, const SlotLayout& layout) {
  std::vector<PropagatedAction> ordered(propagated.begin(), propagated.end());
  for (const auto& p : ordered) {
    if (std::find(obs_set.begin(), obs_set.end(), p.from) == obs_set.end()) {
      throw InvalidArgument("agent " + std::to_string(p.from.value()) +
                            " propagated an action but is not observable");
    }
  }
  if (layout.order == SlotOrder::Neighbor) {
    ModifiedObservation out = fill_slots(base, {}, layout);
    for (const auto& p : ordered) {
      const auto k = static_cast<std::size_t>(std::find(obs_set.begin(), obs_set.end(), p.from) - obs_set.begin());
      if (k >= out.slots.size()) throw InvalidArgument("observable set is wider than the slot layout");
      if (p.encoded_action.size() != layout.encoded_action_dim) {
        throw InvalidArgument("propagated action has the wrong width");
      }
      out.slots[k].action = p.encoded_action;
      out.slots[k].present = true;
    }
    return out;
  }
  std::stable_sort(ordered.begin(), ordered.end(), [&](const PropagatedAction& a, const PropagatedAction& b) {
    return rank.position_of(a.from) < rank.position_of(b.from);
  });
  return fill_slots(base, ordered, layout);
}

Vector inject_noise(std::span<const double> action, const NoiseSpec& spec,
                    std::span<const double> action_max_abs, Rng& rng) {
  Vector out(action.begin(), action.end());
  if (!spec.active()) return out;
  if (action_max_abs.size() != action.size()) {
    throw InvalidArgument("noise bound width does not match the action");
  }
  for (std::size_t d = 0; d < out.size(); ++d) {
    const double variance = spec.variance_fraction * std::abs(action_max_abs[d]);
    out[d] += rng.normal(0.0, std::sqrt(variance));
  }
  return out;
}

namespace {

DecisionOutcome empty_outcome(std::size_t n) {
  DecisionOutcome out;
  out.joint_action.per_agent.resize(n);
  out.samples.resize(n);
  out.modified.resize(n);
  out.contributors.resize(n);
  out.noise_applied.assign(n, false);
  return out;
}

}  // namespace

DecisionOutcome sequential_decide(const PriorityRank& rank, const JointObservation& obs_d,
                                  const DecisionPolicy& policy, const ObservableSets& obs_sets,
                                  const ActionSpec& action_spec, const SlotLayout& layout,
                                  const NoiseSpec& noise, Rng& policy_rng, Rng& noise_rng) {
  const std::size_t n = obs_d.size();
  if (rank.size() != n || obs_sets.size() != n) {
    throw InvalidArgument("rank, observations and observable sets disagree on the agent count");
  }
  const std::vector<double> max_abs = action_spec.encoded_max_abs();
  DecisionOutcome out = empty_outcome(n);
  std::vector<Vector> encoded(n);  // executed actions in encoded form, filled in rank order
  for (AgentId agent : rank.order()) {
    const std::size_t i = agent.index();
    const auto contributors = observable_higher_priority(rank, agent, obs_sets[i]);
    std::vector<PropagatedAction> propagated;
    propagated.reserve(contributors.size());
    for (AgentId j : contributors) {
      propagated.push_back({j, inject_noise(encoded[j.index()], noise, max_abs, noise_rng)});
    }
    ModifiedObservation modified =
        build_modified_observation(obs_d.per_agent[i], propagated, obs_sets[i], rank, layout);
    ActionSample sample = policy(modified.flatten(), policy_rng);
    encoded[i] = action_spec.encode(sample.action);
    out.joint_action.per_agent[i] = sample.action;
    out.samples[i] = std::move(sample);
    out.modified[i] = std::move(modified);
    out.contributors[i] = contributors;
    out.noise_applied[i] = noise.active() && !contributors.empty();
    out.acting_order.push_back(agent);
  }
  return out;
}

std::vector<PropagatedAction> predict_opponent_actions(AgentId agent, const JointObservation& obs_d,
                                                       std::span<const AgentId> obs_set,
                                                       const MeanPolicy& own_policy,
                                                       const ActionSpec& action_spec,
                                                       const SlotLayout& layout) {
  std::vector<PropagatedAction> out;
  for (AgentId j : obs_set) {
    if (j == agent) throw InvalidArgument("an agent cannot observe itself");
    const ModifiedObservation theirs = fill_slots(obs_d.per_agent.at(j.index()), {}, layout);
    out.push_back({j, action_spec.encode(own_policy(theirs.flatten()))});
    if (out.size() == static_cast<std::size_t>(layout.k_obs)) break;
  }
  return out;
}

DecisionOutcome simultaneous_decide(const JointObservation& obs_d, const DecisionPolicy& policy,
                                    SimultaneousSlots slots, const MeanPolicy& predictor,
                                    const ObservableSets& obs_sets, const ActionSpec& action_spec,
                                    const SlotLayout& layout, Rng& policy_rng) {
  const std::size_t n = obs_d.size();
  DecisionOutcome out = empty_outcome(n);
  // Inputs are fixed before anyone acts.
  for (std::size_t i = 0; i < n; ++i) {
    const AgentId agent = AgentId::from_index(i);
    std::vector<PropagatedAction> predicted;
    if (slots == SimultaneousSlots::Predicted) {
      predicted = predict_opponent_actions(agent, obs_d, obs_sets.at(i), predictor, action_spec, layout);
      for (const auto& p : predicted) out.contributors[i].push_back(p.from);
    }
    out.modified[i] = fill_slots(obs_d.per_agent[i], predicted, layout);
  }
  for (std::size_t i = 0; i < n; ++i) {
    ActionSample sample = policy(out.modified[i].flatten(), policy_rng);
    out.joint_action.per_agent[i] = sample.action;
    out.samples[i] = std::move(sample);
    out.acting_order.push_back(AgentId::from_index(i));
  }
  return out;
}

}  // namespace xpmarl
