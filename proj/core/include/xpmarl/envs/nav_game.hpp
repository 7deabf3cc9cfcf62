#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "xpmarl/pomg.hpp"
#include "xpmarl/value.hpp"

namespace xpmarl {

/// Actions in each agent's own frame. The agents face each other, so one
/// agent's left is the other's right in the global frame.
enum class NavAction { Left = 0, Straight = 1, Right = 2 };

NavAction mirror(NavAction action);

/// Both straight: -10. Exactly one straight: 10. Both evade into the same
/// global corridor: -10. Both evade into different corridors: 5.
PayoffTable default_nav_payoff();

double nav_game_step(const PayoffTable& payoff, NavAction first, NavAction second);

/// Two-agent single-step navigation game with a constant (empty) observation.
class NavGame final : public TeamEnv {
 public:
  explicit NavGame(PayoffTable payoff = default_nav_payoff(), double discount = 0.99);

  std::string name() const override { return "nav_game"; }
  int num_agents() const override { return 2; }
  std::size_t obs_dim() const override { return 0; }
  const ActionSpec& action_spec() const override { return spec_; }
  double discount() const override { return discount_; }
  int max_episode_steps() const override { return 1; }

  JointObservation reset(std::uint64_t seed) override;
  StepResult step(const JointAction& actions) override;
  ObservableSets observable_sets(int k_obs) const override;
  std::unique_ptr<TeamEnv> clone() const override;
  /// Both agents are flagged when they ended up in the same corridor.
  std::vector<AgentTelemetry> telemetry() const override;

  const PayoffTable& payoff() const { return payoff_; }

 private:
  PayoffTable payoff_;
  double discount_;
  ActionSpec spec_;
  bool done_ = true;
  bool stepped_ = false;
  std::array<NavAction, 2> last_{NavAction::Straight, NavAction::Straight};
};

}  // namespace xpmarl
