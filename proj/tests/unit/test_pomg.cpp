#include <gtest/gtest.h>

#include <cmath>

#include "xpmarl/envs/grid_traffic.hpp"
#include "xpmarl/envs/nav_game.hpp"
#include "xpmarl/errors.hpp"
#include "xpmarl/value.hpp"

using namespace xpmarl;

namespace {

JointAction nav(NavAction a, NavAction b) {
  return JointAction{{{static_cast<double>(a)}, {static_cast<double>(b)}}};
}

}  // namespace

TEST(AgentId, IsOneBased) {
  EXPECT_EQ(AgentId::from_index(0).value(), 1);
  EXPECT_EQ(AgentId(3).index(), 2u);
}

TEST(ActionSpec, BoxContainsAndEncode) {
  const ActionSpec box(BoxSpec{{-1.0, 0.0}, {1.0, 2.0}});
  const std::vector<double> inside{0.5, 2.0};
  const std::vector<double> outside{0.5, 2.1};
  EXPECT_TRUE(box.contains(inside));
  EXPECT_FALSE(box.contains(outside));
  EXPECT_EQ(box.encode(inside), inside);
  EXPECT_EQ(box.encoded_dim(), 2u);
  EXPECT_EQ(box.encoded_max_abs(), (std::vector<double>{1.0, 2.0}));
}

TEST(ActionSpec, DiscreteEncodesOneHot) {
  const ActionSpec d(DiscreteSpec{3});
  const std::vector<double> symbol{2.0};
  EXPECT_EQ(d.encode(symbol), (std::vector<double>{0.0, 0.0, 1.0}));
  EXPECT_EQ(d.action_dim(), 1u);
  EXPECT_EQ(d.encoded_dim(), 3u);
  const std::vector<double> bad{3.0};
  const std::vector<double> fractional{1.5};
  EXPECT_FALSE(d.contains(bad));
  EXPECT_FALSE(d.contains(fractional));
}

TEST(NavGameEnv, ResetGivesEmptyContext) {
  NavGame game;
  const auto obs = game.reset(0);
  ASSERT_EQ(obs.per_agent.size(), 2u);
  EXPECT_TRUE(obs.per_agent[0].empty());
  EXPECT_TRUE(obs.per_agent[1].empty());
}

TEST(NavGameEnv, StepExamples) {
  NavGame game;
  game.reset(0);
  auto r = game.step(nav(NavAction::Straight, NavAction::Straight));
  EXPECT_EQ(r.team_reward, -10.0);
  EXPECT_TRUE(r.done);
  game.reset(0);
  EXPECT_EQ(game.step(nav(NavAction::Straight, NavAction::Left)).team_reward, 10.0);
  game.reset(0);
  // Agent 1 left and agent 2 left evade into different global corridors.
  EXPECT_EQ(game.step(nav(NavAction::Left, NavAction::Left)).team_reward, 5.0);
}

TEST(NavGameEnv, RewardIsIdenticalForEveryAgent) {
  NavGame game;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      game.reset(0);
      const auto r = game.step(nav(static_cast<NavAction>(a), static_cast<NavAction>(b)));
      EXPECT_EQ(r.reward_of(AgentId(1)), r.reward_of(AgentId(2)));
    }
  }
}

TEST(NavGameEnv, OutOfBoundsActionIsRejected) {
  NavGame game;
  game.reset(0);
  EXPECT_THROW(game.step(JointAction{{{3.0}, {0.0}}}), BoundsViolation);
  EXPECT_THROW(game.step(JointAction{{{0.0}}}), BoundsViolation);
}

TEST(NavGameEnv, StepAfterDoneThrows) {
  NavGame game;
  game.reset(0);
  game.step(nav(NavAction::Left, NavAction::Straight));
  EXPECT_THROW(game.step(nav(NavAction::Left, NavAction::Straight)), InvalidArgument);
}

TEST(GridTrafficEnv, ResetIsDeterministicPerSeed) {
  GridTraffic env(default_traffic_scenario(), 4, 100);
  const auto a = env.reset(7);
  const auto b = env.reset(7);
  const auto c = env.reset(8);
  EXPECT_EQ(a.per_agent, b.per_agent);
  EXPECT_NE(a.per_agent, c.per_agent);
}

TEST(GridTrafficEnv, OutOfBoundsAccelerationIsRejected) {
  GridTraffic env(default_traffic_scenario(), 2, 10);
  env.reset(0);
  EXPECT_THROW(env.step(JointAction{{{2.5, 0.0}, {0.0, 0.0}}}), BoundsViolation);
}

TEST(ExactMatrixValue, PointMassesGiveTheCell) {
  const auto payoff = default_nav_payoff();
  const std::vector<double> straight{0, 1, 0};
  const std::vector<double> left{1, 0, 0};
  EXPECT_EQ(exact_matrix_value(payoff, straight, left), 10.0);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::vector<double> p1(3, 0.0);
      std::vector<double> p2(3, 0.0);
      p1[static_cast<std::size_t>(r)] = 1.0;
      p2[static_cast<std::size_t>(c)] = 1.0;
      EXPECT_EQ(exact_matrix_value(payoff, p1, p2), payoff[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
  }
}

TEST(ExactMatrixValue, UniformPlayIsMeanOfTable) {
  const std::vector<double> uniform(3, 1.0 / 3.0);
  EXPECT_NEAR(exact_matrix_value(default_nav_payoff(), uniform, uniform), 20.0 / 9.0, 1e-12);
}

TEST(ExactMatrixValue, RejectsUnnormalizedDistributions) {
  const std::vector<double> bad{0.5, 0.5, 0.1};
  const std::vector<double> ok{1, 0, 0};
  EXPECT_THROW(exact_matrix_value(default_nav_payoff(), bad, ok), InvalidArgument);
  EXPECT_THROW(exact_matrix_value(default_nav_payoff(), ok, bad), InvalidArgument);
}

TEST(MonteCarloValue, DeterministicProfileSingleRollout) {
  NavGame game;
  const JointPolicy policy = [](const JointObservation&, Rng&) {
    return nav(NavAction::Straight, NavAction::Left);
  };
  const auto v = monte_carlo_value(game, policy, 1, 0);
  ASSERT_EQ(v.per_agent.size(), 2u);
  EXPECT_EQ(v.per_agent[0], 10.0);
  EXPECT_EQ(v.per_agent[1], 10.0);
}

TEST(MonteCarloValue, UniformPolicyMatchesEnumeration) {
  NavGame game;
  const JointPolicy uniform = [](const JointObservation&, Rng& rng) {
    return JointAction{{{static_cast<double>(rng.uniform_int(0, 2))}, {static_cast<double>(rng.uniform_int(0, 2))}}};
  };
  const auto v = monte_carlo_value(game, uniform, 1'000'000, 42);
  const std::vector<double> u(3, 1.0 / 3.0);
  const double exact = exact_matrix_value(default_nav_payoff(), u, u);
  EXPECT_LT(std::abs(v.per_agent[0] - exact), 3.0 * v.standard_error);
  EXPECT_EQ(v.per_agent[0], v.per_agent[1]);
}

TEST(MonteCarloValue, ZeroRewardWrapperGivesZero) {
  ZeroRewardEnv env(std::make_unique<GridTraffic>(default_traffic_scenario(), 3, 20));
  const JointPolicy cruise = [](const JointObservation& obs, Rng&) {
    return JointAction{std::vector<Vector>(obs.per_agent.size(), Vector{1.0, 0.0})};
  };
  const auto v = monte_carlo_value(env, cruise, 3, 1);
  for (double x : v.per_agent) EXPECT_EQ(x, 0.0);
}

TEST(MonteCarloValue, RejectsZeroRollouts) {
  NavGame game;
  const JointPolicy p = [](const JointObservation&, Rng&) { return nav(NavAction::Left, NavAction::Left); };
  EXPECT_THROW(monte_carlo_value(game, p, 0, 0), InvalidArgument);
}

TEST(JointLogProb, IsTheSumOfPerAgentTerms) {
  const std::vector<double> parts{-0.5, -1.25, -2.0};
  EXPECT_DOUBLE_EQ(joint_log_prob(parts), -3.75);
}
