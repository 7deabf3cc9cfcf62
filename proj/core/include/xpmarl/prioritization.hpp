#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xpmarl/pomg.hpp"

namespace xpmarl {

class Actor;
enum class ActMode;

/// Permutation of agents, highest priority first.
class PriorityRank {
 public:
  PriorityRank() = default;
  /// Throws InvalidArgument unless `order` is a permutation of {1..N}.
  explicit PriorityRank(std::vector<AgentId> order);

  static PriorityRank identity(std::size_t num_agents);

  const std::vector<AgentId>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  AgentId operator[](std::size_t position) const { return order_[position]; }

  /// 0-based position of `agent` in the rank; throws if absent.
  std::size_t position_of(AgentId agent) const;
  bool contains(AgentId agent) const;

  friend bool operator==(const PriorityRank&, const PriorityRank&) = default;

 private:
  std::vector<AgentId> order_;
  std::vector<std::size_t> position_;  // by AgentId::index()
};

/// Agent ids sorting `scores` in descending order, ties by ascending id.
/// Throws InvalidArgument on NaN.
std::vector<AgentId> argsort_desc(std::span<const double> scores);

/// A priority score as it would be broadcast by its owner in a decentralized
/// deployment.
struct ScoreBroadcast {
  AgentId sender;
  double score = 0.0;
};

struct PriorityAssignment {
  PriorityRank rank;
  std::vector<double> scores;       // by AgentId
  std::vector<ActionSample> samples; // by AgentId, for the learner
  std::vector<ScoreBroadcast> broadcasts;
};

/// Generates a priority rank: every agent's score is drawn from the shared
/// priority actor conditioned on that agent's own observation only, then the
/// scores are sorted descending.
PriorityAssignment assign_priorities(const JointObservation& obs_p, const Actor& priority_actor,
                                     ActMode mode, Rng& rng);

/// Uniformly random permutation of N > 1 agents.
PriorityRank random_rank(std::size_t num_agents, Rng& rng);

}  // namespace xpmarl
