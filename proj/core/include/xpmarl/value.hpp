#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "xpmarl/pomg.hpp"

namespace xpmarl {

using JointPolicy = std::function<JointAction(const JointObservation&, Rng&)>;

struct ValueEstimate {
  std::vector<double> per_agent;  // identical entries in a team game
  double standard_error = 0.0;
  int num_rollouts = 0;
};

/// Monte-Carlo estimate of the discounted return of `policy` from the reset
/// distribution of `env`. Rollout k resets with a seed derived from `seed`.
ValueEstimate monte_carlo_value(TeamEnv& env, const JointPolicy& policy, int num_rollouts,
                                std::uint64_t seed);

using PayoffTable = std::array<std::array<double, 3>, 3>;

/// Expected payoff sum_ij p1(i) p2(j) payoff(i, j) of a single-step 3x3 game.
/// Throws InvalidArgument unless both distributions sum to 1 within 1e-9.
double exact_matrix_value(const PayoffTable& payoff, std::span<const double> policy_1,
                          std::span<const double> policy_2);

/// Log-probability of a joint action drawn from independent per-agent policies.
double joint_log_prob(std::span<const double> per_agent_log_probs);

/// Passes through everything except the reward, which is forced to zero.
class ZeroRewardEnv final : public TeamEnv {
 public:
  explicit ZeroRewardEnv(std::unique_ptr<TeamEnv> inner);

  std::string name() const override;
  int num_agents() const override { return inner_->num_agents(); }
  std::size_t obs_dim() const override { return inner_->obs_dim(); }
  const ActionSpec& action_spec() const override { return inner_->action_spec(); }
  double discount() const override { return inner_->discount(); }
  int max_episode_steps() const override { return inner_->max_episode_steps(); }
  JointObservation reset(std::uint64_t seed) override { return inner_->reset(seed); }
  StepResult step(const JointAction& actions) override;
  ObservableSets observable_sets(int k_obs) const override { return inner_->observable_sets(k_obs); }
  std::unique_ptr<TeamEnv> clone() const override;
  std::vector<AgentTelemetry> telemetry() const override { return inner_->telemetry(); }
  double max_speed() const override { return inner_->max_speed(); }

 private:
  std::unique_ptr<TeamEnv> inner_;
};

}  // namespace xpmarl
