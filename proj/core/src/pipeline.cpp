#include "xpmarl/pipeline.hpp"

#include "xpmarl/errors.hpp"

namespace xpmarl {

StepStreams::StepStreams(std::uint64_t seed)
    : policy(Rng(seed).derive(11)), rank(Rng(seed).derive(12)), noise(Rng(seed).derive(13)) {}

JointObservation StepDecision::decision_inputs() const {
  JointObservation out;
  out.per_agent.reserve(decision.modified.size());
  for (const auto& m : decision.modified) out.per_agent.push_back(m.flatten());
  return out;
}

StepDecision decide_step(const PipelineWiring& wiring, const JointObservation& obs,
                         const ObservableSets& obs_sets, const PolicySet& policies,
                         const SlotLayout& layout, ActMode mode, StepStreams& streams) {
  if (policies.decision == nullptr) throw InvalidArgument("decide_step needs a decision actor");
  const Actor& decision_actor = *policies.decision;
  const std::size_t n = obs.size();

  StepDecision out;
  switch (wiring.priority) {
    case PrioritySource::Learned:
      if (policies.priority == nullptr) throw InvalidArgument("learned priorities need a priority actor");
      out.priority = assign_priorities(obs, *policies.priority, mode, streams.policy);
      out.rank = out.priority->rank;
      break;
    case PrioritySource::Random:
      out.rank = random_rank(n, streams.rank);
      break;
    case PrioritySource::None:
      out.rank = PriorityRank::identity(n);
      break;
  }

  const DecisionPolicy act = [&](std::span<const double> input, Rng& rng) {
    return decision_actor.act(input, mode, rng);
  };
  const MeanPolicy mean = [&](std::span<const double> input) { return decision_actor.mean_action(input); };

  switch (wiring.slots) {
    case SlotSource::Propagated:
      out.decision = sequential_decide(out.rank, obs, act, obs_sets, decision_actor.action_spec(), layout,
                                       wiring.noise, streams.policy, streams.noise);
      break;
    case SlotSource::Empty:
      out.decision = simultaneous_decide(obs, act, SimultaneousSlots::Empty, mean, obs_sets,
                                         decision_actor.action_spec(), layout, streams.policy);
      break;
    case SlotSource::Predicted:
      out.decision = simultaneous_decide(obs, act, SimultaneousSlots::Predicted, mean, obs_sets,
                                         decision_actor.action_spec(), layout, streams.policy);
      break;
  }
  return out;
}

}  // namespace xpmarl
