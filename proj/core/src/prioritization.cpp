#include "xpmarl/prioritization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xpmarl/errors.hpp"
#include "xpmarl/learner/policy.hpp"

namespace xpmarl {

PriorityRank::PriorityRank(std::vector<AgentId> order) : order_(std::move(order)) {
  position_.assign(order_.size(), order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const int id = order_[k].value();
    if (id < 1 || static_cast<std::size_t>(id) > order_.size()) {
      throw InvalidArgument("priority rank contains out-of-range agent id " + std::to_string(id));
    }
    if (position_[order_[k].index()] != order_.size()) {
      throw InvalidArgument("priority rank lists agent " + std::to_string(id) + " twice");
    }
    position_[order_[k].index()] = k;
  }
}

PriorityRank PriorityRank::identity(std::size_t num_agents) {
  std::vector<AgentId> order;
  order.reserve(num_agents);
  for (std::size_t i = 0; i < num_agents; ++i) order.push_back(AgentId::from_index(i));
  return PriorityRank(std::move(order));
}

bool PriorityRank::contains(AgentId agent) const {
  return agent.value() >= 1 && agent.index() < position_.size();
}

std::size_t PriorityRank::position_of(AgentId agent) const {
  if (!contains(agent)) {
    throw InvalidArgument("agent " + std::to_string(agent.value()) + " is not in the priority rank");
  }
  return position_[agent.index()];
}

std::vector<AgentId> argsort_desc(std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) {
      throw InvalidArgument("priority score of agent " + std::to_string(i + 1) + " is NaN");
    }
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<AgentId> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(AgentId::from_index(i));
  return out;
}

PriorityAssignment assign_priorities(const JointObservation& obs_p, const Actor& priority_actor,
                                     ActMode mode, Rng& rng) {
  const std::size_t n = obs_p.size();
  if (n < 2) throw InvalidArgument("priority assignment needs more than one agent");
  if (priority_actor.action_spec().is_discrete() || priority_actor.action_spec().action_dim() != 1) {
    throw InvalidArgument("priority actor must emit a scalar continuous score");
  }
  PriorityAssignment out;
  out.scores.reserve(n);
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ActionSample sample = priority_actor.act(obs_p.per_agent[i], mode, rng);
    out.scores.push_back(sample.action[0]);
    out.broadcasts.push_back({AgentId::from_index(i), sample.action[0]});
    out.samples.push_back(std::move(sample));
  }
  out.rank = PriorityRank(argsort_desc(out.scores));
  return out;
}

PriorityRank random_rank(std::size_t num_agents, Rng& rng) {
  if (num_agents < 2) throw InvalidArgument("random_rank needs more than one agent");
  std::vector<AgentId> order;
  order.reserve(num_agents);
  for (std::size_t i = 0; i < num_agents; ++i) order.push_back(AgentId::from_index(i));
  std::shuffle(order.begin(), order.end(), rng.engine());
  return PriorityRank(std::move(order));
}

}  // namespace xpmarl
