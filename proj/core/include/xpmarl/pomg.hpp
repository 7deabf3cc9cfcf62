#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xpmarl/rng.hpp"

namespace xpmarl {

/// 1-based agent identifier.
class AgentId {
 public:
  constexpr AgentId() = default;
  constexpr explicit AgentId(int value) : value_(value) {}
  static constexpr AgentId from_index(std::size_t index) { return AgentId(static_cast<int>(index) + 1); }

  constexpr int value() const { return value_; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(value_ - 1); }

  friend constexpr auto operator<=>(AgentId, AgentId) = default;

 private:
  int value_ = 1;
};

struct BoxSpec {
  std::vector<double> low;
  std::vector<double> high;
};

struct DiscreteSpec {
  int num_actions = 0;
};

/// Per-agent action space: a continuous box or a finite set of symbols.
class ActionSpec {
 public:
  ActionSpec(BoxSpec box);
  ActionSpec(DiscreteSpec discrete);

  bool is_discrete() const { return std::holds_alternative<DiscreteSpec>(spec_); }
  const BoxSpec& box() const { return std::get<BoxSpec>(spec_); }
  int num_actions() const { return std::get<DiscreteSpec>(spec_).num_actions; }

  /// Width of an action as stored in a JointAction (box dims, or 1 symbol).
  std::size_t action_dim() const;
  /// Width of an action when communicated to other agents (box dims, or a
  /// one-hot vector for discrete actions).
  std::size_t encoded_dim() const;
  /// Largest absolute action value per encoded dimension.
  std::vector<double> encoded_max_abs() const;

  bool contains(std::span<const double> action) const;
  std::vector<double> encode(std::span<const double> action) const;

 private:
  std::variant<BoxSpec, DiscreteSpec> spec_;
};

using Vector = std::vector<double>;

/// Per-agent actions ordered by AgentId. Discrete actions are stored as a
/// single element holding the symbol index.
struct JointAction {
  std::vector<Vector> per_agent;
  std::size_t size() const { return per_agent.size(); }
};

/// Per-agent observations ordered by AgentId.
struct JointObservation {
  std::vector<Vector> per_agent;
  std::size_t size() const { return per_agent.size(); }
};

struct StepResult {
  JointObservation observation;
  double team_reward = 0.0;
  bool done = false;

  /// Reward seen by `agent`. Team games hand every agent the shared reward.
  double reward_of(AgentId /*agent*/) const { return team_reward; }
};

/// Observable agents of each agent, indexed by AgentId::index().
using ObservableSets = std::vector<std::vector<AgentId>>;

/// Per-agent quantities the evaluation metrics are computed from.
struct AgentTelemetry {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  bool in_collision = false;
};

/// Team partially observable Markov game. The instance owns its state; reset
/// and step are deterministic given the seed and the joint actions.
class TeamEnv {
 public:
  virtual ~TeamEnv() = default;

  virtual std::string name() const = 0;
  virtual int num_agents() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual const ActionSpec& action_spec() const = 0;
  virtual double discount() const = 0;
  virtual int max_episode_steps() const = 0;

  virtual JointObservation reset(std::uint64_t seed) = 0;
  /// Throws BoundsViolation for actions outside the action spec.
  virtual StepResult step(const JointAction& actions) = 0;

  /// Up to `k_obs` observable agents per agent under the current state.
  virtual ObservableSets observable_sets(int k_obs) const = 0;

  virtual std::unique_ptr<TeamEnv> clone() const = 0;

  /// State of every agent after the last reset/step.
  virtual std::vector<AgentTelemetry> telemetry() const;
  virtual double max_speed() const { return 1.0; }

 protected:
  /// Shared bounds check used by implementations of step().
  void check_actions(const JointAction& actions) const;
};

/// One environment step as stored in a rollout buffer.
struct ActionSample {
  Vector action;  // bounded action handed to the environment
  Vector raw;     // pre-squash Gaussian sample, or {symbol} for discrete heads
  double log_prob = 0.0;
};

struct TransitionRecord {
  JointObservation obs;  // actor inputs, ordered by AgentId
  std::vector<ActionSample> actions;
  std::vector<double> log_probs;
  double team_reward = 0.0;
  bool done = false;
  std::vector<double> value_estimates;
};

}  // namespace xpmarl
