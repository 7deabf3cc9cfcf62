#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "xpmarl/learner/adam.hpp"
#include "xpmarl/learner/policy.hpp"
#include "xpmarl/pomg.hpp"

namespace xpmarl {

struct PpoHyperparameters {
  std::vector<std::size_t> hidden{64, 64};
  double learning_rate = 3e-4;
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int epochs = 4;
  int minibatch_size = 64;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int rollout_steps = 1024;
  double initial_log_std = -0.5;
  bool normalize_advantages = true;
  bool value_normalization = true;
};

struct PpoDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double policy_grad_norm = 0.0;  // pre-clipping, first minibatch
  std::size_t num_samples = 0;
  std::uint64_t actor_hash = 0;
};

/// Actor samples are (step, agent) pairs; every agent at step t shares the
/// team advantage of step t.
struct ActorBatch {
  Eigen::MatrixXd inputs;  // input_dim x B
  Eigen::MatrixXd raw;     // raw_dim x B
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;
};

struct CriticBatch {
  Eigen::MatrixXd inputs;  // joint input x B
  Eigen::VectorXd old_values;
  Eigen::VectorXd returns;
};

struct ActorLoss {
  double total = 0.0;
  double policy_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

/// Clipped surrogate minus entropy bonus, averaged over the batch. Adds the
/// gradient to `grad` when non-null.
ActorLoss actor_loss(const Actor& actor, const Eigen::VectorXd& params, const ActorBatch& batch,
                     double clip, double entropy_coef, Eigen::VectorXd* grad);

/// value_coef * 0.5 * mean(max((V - R)^2, (V_clipped - R)^2)).
double critic_loss(const Critic& critic, const Eigen::VectorXd& params, const CriticBatch& batch,
                   double clip, double value_coef, Eigen::VectorXd* grad);

class RolloutBuffer {
 public:
  void push(TransitionRecord record) { records_.push_back(std::move(record)); }
  void clear() { records_.clear(); }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<TransitionRecord>& records() const { return records_; }
  std::vector<double> rewards() const;

 private:
  std::vector<TransitionRecord> records_;
};

/// One actor-critic learning problem: a shared actor, a centralized critic
/// and the rollout buffer feeding them.
class MappoInstance {
 public:
  MappoInstance(int num_agents, std::size_t actor_input_dim, ActionSpec action_spec,
                PpoHyperparameters hp, Rng& init_rng);

  const Actor& actor() const { return actor_; }
  Actor& actor() { return actor_; }
  const Critic& critic() const { return critic_; }
  Critic& critic() { return critic_; }
  RolloutBuffer& buffer() { return buffer_; }
  const RolloutBuffer& buffer() const { return buffer_; }
  const PpoHyperparameters& hyperparameters() const { return hp_; }
  int num_agents() const { return num_agents_; }

  double critic_value(const JointObservation& actor_inputs) const;

  /// Clipped PPO update over the buffer (which must end on a completed
  /// episode), then clears it. Throws NumericalDivergence on NaN.
  PpoDiagnostics update(Rng& shuffle_rng);

  Adam& actor_optimizer() { return actor_opt_; }
  Adam& critic_optimizer() { return critic_opt_; }
  const Adam& actor_optimizer() const { return actor_opt_; }
  const Adam& critic_optimizer() const { return critic_opt_; }

 private:
  int num_agents_;
  PpoHyperparameters hp_;
  Actor actor_;
  Critic critic_;
  Adam actor_opt_;
  Adam critic_opt_;
  RolloutBuffer buffer_;
};

}  // namespace xpmarl
