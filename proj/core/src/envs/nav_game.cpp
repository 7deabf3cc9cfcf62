#include "xpmarl/envs/nav_game.hpp"

#include "xpmarl/errors.hpp"

namespace xpmarl {

namespace {

enum class Corridor { A, Center, B };

// Agent 1's left and agent 2's right share corridor A.
Corridor corridor_of(int agent, NavAction a) {
  if (a == NavAction::Straight) return Corridor::Center;
  const bool left = a == NavAction::Left;
  return (agent == 1) == left ? Corridor::A : Corridor::B;
}

NavAction to_action(double symbol) { return static_cast<NavAction>(static_cast<int>(symbol)); }

}  // namespace

NavAction mirror(NavAction action) {
  switch (action) {
    case NavAction::Left:
      return NavAction::Right;
    case NavAction::Right:
      return NavAction::Left;
    case NavAction::Straight:
      break;
  }
  return NavAction::Straight;
}

PayoffTable default_nav_payoff() {
  PayoffTable table{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto a1 = static_cast<NavAction>(i);
      const auto a2 = static_cast<NavAction>(j);
      const int straight = (a1 == NavAction::Straight) + (a2 == NavAction::Straight);
      if (corridor_of(1, a1) == corridor_of(2, a2)) {
        table[i][j] = -10.0;
      } else if (straight == 1) {
        table[i][j] = 10.0;
      } else {
        table[i][j] = 5.0;
      }
    }
  }
  return table;
}

double nav_game_step(const PayoffTable& payoff, NavAction first, NavAction second) {
  return payoff[static_cast<std::size_t>(first)][static_cast<std::size_t>(second)];
}

NavGame::NavGame(PayoffTable payoff, double discount)
    : payoff_(payoff), discount_(discount), spec_(DiscreteSpec{3}) {
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
}

JointObservation NavGame::reset(std::uint64_t /*seed*/) {
  done_ = false;
  last_ = {NavAction::Straight, NavAction::Straight};
  stepped_ = false;
  return JointObservation{{Vector{}, Vector{}}};
}

StepResult NavGame::step(const JointAction& actions) {
  check_actions(actions);
  if (done_) throw InvalidArgument("nav_game stepped after the episode ended; call reset first");
  last_ = {to_action(actions.per_agent[0][0]), to_action(actions.per_agent[1][0])};
  stepped_ = true;
  done_ = true;
  StepResult result;
  result.observation = JointObservation{{Vector{}, Vector{}}};
  result.team_reward = nav_game_step(payoff_, last_[0], last_[1]);
  result.done = true;
  return result;
}

ObservableSets NavGame::observable_sets(int k_obs) const {
  if (k_obs < 1) return {{}, {}};
  return {{AgentId(2)}, {AgentId(1)}};
}

std::unique_ptr<TeamEnv> NavGame::clone() const { return std::make_unique<NavGame>(*this); }

std::vector<AgentTelemetry> NavGame::telemetry() const {
  std::vector<AgentTelemetry> out(2);
  const bool collided = stepped_ && corridor_of(1, last_[0]) == corridor_of(2, last_[1]);
  for (auto& t : out) t.in_collision = collided;
  return out;
}

}  // namespace xpmarl
