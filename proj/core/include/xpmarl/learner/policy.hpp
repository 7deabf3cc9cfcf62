#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xpmarl/learner/mlp.hpp"
#include "xpmarl/pomg.hpp"

namespace xpmarl {

enum class ActMode { Stochastic, Mean };

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Decentralized actor shared by all agents of one learning instance.
///
/// Box actions use a diagonal Gaussian over a pre-squash variable u with a
/// state-independent log-std; the executed action is
/// low + (tanh(u) + 1) / 2 * (high - low). Discrete actions use a softmax
/// over the network outputs.
///
/// Parameters are [mlp parameters, log_std (box only)].
class Actor {
 public:
  Actor(std::size_t input_dim, std::vector<std::size_t> hidden, ActionSpec action_spec);

  void initialize(Rng& rng, double initial_log_std = -0.5);

  ActionSample act(std::span<const double> obs, ActMode mode, Rng& rng) const;
  /// Squashed mean (box) or most likely symbol (discrete).
  Vector mean_action(std::span<const double> obs) const;
  double log_prob(std::span<const double> obs, std::span<const double> raw) const;

  struct BatchEval {
    Eigen::VectorXd log_probs;
    Eigen::VectorXd entropies;
    Eigen::MatrixXd head;  // network outputs
    Mlp::Cache cache;
  };
  /// Columns are samples; `raw` holds ActionSample::raw per column.
  BatchEval evaluate(const Eigen::Ref<const Eigen::VectorXd>& params,
                     const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                     const Eigen::Ref<const Eigen::MatrixXd>& raw) const;
  /// Adds the gradient of sum_k (dlogp_k * log_prob_k + dentropy_k * entropy_k).
  void backward(const Eigen::Ref<const Eigen::VectorXd>& params, const BatchEval& eval,
                const Eigen::Ref<const Eigen::MatrixXd>& raw, const Eigen::VectorXd& dlogp,
                const Eigen::VectorXd& dentropy, Eigen::Ref<Eigen::VectorXd> grad) const;

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  std::size_t num_parameters() const { return static_cast<std::size_t>(params_.size()); }
  std::uint64_t parameter_hash() const;

  std::size_t input_dim() const { return mlp_.architecture().input_dim; }
  const std::vector<std::size_t>& hidden() const { return mlp_.architecture().hidden; }
  const ActionSpec& action_spec() const { return spec_; }
  std::size_t raw_dim() const;
  const Mlp& network() const { return mlp_; }

 private:
  Eigen::VectorXd clamped_log_std(const Eigen::Ref<const Eigen::VectorXd>& params) const;
  Vector squash(std::span<const double> raw) const;

  ActionSpec spec_;
  Mlp mlp_;
  Eigen::VectorXd params_;
};

/// Running mean and variance of value targets (parallel Welford merge).
struct ReturnStatistics {
  double mean = 0.0;
  double var = 1.0;
  double count = 0.0;

  void update(std::span<const double> batch);
  double std() const;
  double normalize(double x) const { return (x - mean) / std(); }
  double denormalize(double y) const { return mean + std() * y; }
};

/// Centralized state-value network over the concatenation of all actors' inputs.
/// With value normalization the network predicts targets in the units of
/// `return_statistics()`.
class Critic {
 public:
  Critic(std::size_t input_dim, std::vector<std::size_t> hidden);

  void initialize(Rng& rng);

  double value(std::span<const double> joint_input) const;

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  std::size_t input_dim() const { return mlp_.architecture().input_dim; }
  const Mlp& network() const { return mlp_; }
  ReturnStatistics& return_statistics() { return stats_; }
  const ReturnStatistics& return_statistics() const { return stats_; }

 private:
  Mlp mlp_;
  Eigen::VectorXd params_;
  ReturnStatistics stats_;
};

/// Concatenates per-agent inputs in AgentId order.
Vector concatenate(const JointObservation& inputs);

std::uint64_t hash_parameters(const Eigen::VectorXd& params);

}  // namespace xpmarl
