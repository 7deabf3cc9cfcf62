#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "xpmarl/envs/grid_traffic.hpp"
#include "xpmarl/envs/nav_game.hpp"
#include "xpmarl/errors.hpp"
#include "xpmarl/learner/policy.hpp"
#include "xpmarl/oracles/reference.hpp"
#include "xpmarl/pipeline.hpp"
#include "xpmarl/propagation.hpp"

using namespace xpmarl;

namespace {

std::vector<AgentId> ids(std::initializer_list<int> values) {
  std::vector<AgentId> out;
  for (int v : values) out.push_back(AgentId(v));
  return out;
}

const ActionSpec kBox(BoxSpec{{-2.0, -0.25}, {2.0, 0.25}});

// Deterministic test policy: the action is a fixed function of the input, so
// the executed action of each agent is known from its modified observation.
ActionSample echo_policy(std::span<const double> in, Rng& rng) {
  double sum = 0.0;
  for (double v : in) sum += v;
  const double jitter = rng.uniform() * 0.01;
  return ActionSample{{std::tanh(sum) + jitter, 0.1 * std::tanh(sum)}, {sum, sum}, -1.0};
}

}  // namespace

TEST(ObservableHigherPriority, HandExample) {
  const PriorityRank rank(ids({3, 1, 2}));
  const auto set = ids({2, 3});
  EXPECT_EQ(observable_higher_priority(rank, AgentId(1), set), ids({3}));
}

TEST(ObservableHigherPriority, TopAgentHasNoPredecessors) {
  const PriorityRank rank(ids({3, 1, 2}));
  EXPECT_TRUE(observable_higher_priority(rank, AgentId(3), ids({1, 2})).empty());
}

TEST(ObservableHigherPriority, AgentMissingFromRankThrows) {
  const PriorityRank rank(ids({2, 1}));
  EXPECT_THROW(observable_higher_priority(rank, AgentId(3), ids({1})), InvalidArgument);
}

TEST(ObservableHigherPriority, MatchesPrefixOracleForSixAgents) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const PriorityRank rank = random_rank(6, rng);
    std::vector<int> order;
    for (AgentId id : rank.order()) order.push_back(id.value());
    const int agent = rng.uniform_int(1, 6);
    std::vector<AgentId> obs_set;
    std::set<int> obs_ids;
    for (int j = 1; j <= 6; ++j) {
      if (j != agent && rng.uniform() < 0.5) {
        obs_set.push_back(AgentId(j));
        obs_ids.insert(j);
      }
    }
    std::set<int> got;
    for (AgentId id : observable_higher_priority(rank, AgentId(agent), obs_set)) got.insert(id.value());
    EXPECT_EQ(got, oracles::prefix_intersection(order, agent, obs_ids));
  }
}

TEST(BuildModifiedObservation, NoContributors) {
  const SlotLayout layout{2, 2};
  const std::vector<double> base{0.5, -1.5, 2.0};
  const PriorityRank rank(ids({1, 2, 3}));
  const auto m = build_modified_observation(base, {}, ids({2, 3}), rank, layout);
  EXPECT_EQ(m.base, base);
  ASSERT_EQ(m.slots.size(), 2u);
  for (const auto& s : m.slots) {
    EXPECT_FALSE(s.present);
    EXPECT_EQ(s.action, (Vector{0.0, 0.0}));
  }
  EXPECT_EQ(m.dim(), 3u + layout.width());
  EXPECT_EQ(m.flatten(), (Vector{0.5, -1.5, 2.0, 0, 0, 0, 0, 0, 0}));
}

TEST(BuildModifiedObservation, OneContributor) {
  const SlotLayout layout{2, 2};
  const PriorityRank rank(ids({2, 1, 3}));
  const std::vector<PropagatedAction> propagated{{AgentId(2), {0.3, -0.1}}};
  const auto m = build_modified_observation(Vector{1.0}, propagated, ids({2, 3}), rank, layout);
  EXPECT_TRUE(m.slots[0].present);
  EXPECT_EQ(m.slots[0].action, (Vector{0.3, -0.1}));
  EXPECT_FALSE(m.slots[1].present);
  EXPECT_EQ(m.flatten(), (Vector{1.0, 0.3, -0.1, 1.0, 0.0, 0.0, 0.0}));
}

TEST(BuildModifiedObservation, SlotsFollowContributorPriority) {
  const SlotLayout layout{2, 1};
  const PriorityRank rank(ids({3, 2, 1}));
  const std::vector<PropagatedAction> propagated{{AgentId(2), {0.2}}, {AgentId(3), {0.3}}};
  const auto m = build_modified_observation(Vector{}, propagated, ids({2, 3}), rank, layout);
  EXPECT_EQ(m.slots[0].action, (Vector{0.3}));
  EXPECT_EQ(m.slots[1].action, (Vector{0.2}));
}

TEST(BuildModifiedObservation, NeighborOrderAlignsSlotsWithTheObservableSet) {
  const SlotLayout layout{2, 1, SlotOrder::Neighbor};
  const PriorityRank rank(ids({3, 1, 2}));
  // Agent 1 sees (2, 3); only 3 outranks it, and 3 is its second neighbor.
  const std::vector<PropagatedAction> propagated{{AgentId(3), {0.3}}};
  const auto m = build_modified_observation(Vector{}, propagated, ids({2, 3}), rank, layout);
  EXPECT_FALSE(m.slots[0].present);
  EXPECT_EQ(m.slots[0].action, (Vector{0.0}));
  EXPECT_TRUE(m.slots[1].present);
  EXPECT_EQ(m.slots[1].action, (Vector{0.3}));
}

TEST(SlotOrderNames, RoundTrip) {
  EXPECT_EQ(parse_slot_order(to_string(SlotOrder::Neighbor)), SlotOrder::Neighbor);
  EXPECT_EQ(parse_slot_order("priority"), SlotOrder::Priority);
  EXPECT_THROW(parse_slot_order("random"), ConfigError);
}

TEST(BuildModifiedObservation, TooManyContributorsThrows) {
  const SlotLayout layout{1, 1};
  const PriorityRank rank(ids({2, 3, 1}));
  const std::vector<PropagatedAction> propagated{{AgentId(2), {0.2}}, {AgentId(3), {0.3}}};
  EXPECT_THROW(build_modified_observation(Vector{}, propagated, ids({2, 3}), rank, layout), InvalidArgument);
}

TEST(BuildModifiedObservation, ContributorOutsideObservableSetThrows) {
  const SlotLayout layout{2, 1};
  const PriorityRank rank(ids({2, 3, 1}));
  const std::vector<PropagatedAction> propagated{{AgentId(2), {0.2}}};
  EXPECT_THROW(build_modified_observation(Vector{}, propagated, ids({3}), rank, layout), InvalidArgument);
}

TEST(SequentialDecide, TwoAgentChain) {
  const SlotLayout layout{1, 2};
  const PriorityRank rank(ids({1, 2}));
  const JointObservation obs{{{0.1}, {0.2}}};
  const ObservableSets sets{ids({2}), ids({1})};
  Rng policy_rng(1);
  Rng noise_rng(2);
  const auto out = sequential_decide(rank, obs, echo_policy, sets, kBox, layout, NoiseSpec{}, policy_rng, noise_rng);
  EXPECT_FALSE(out.modified[0].slots[0].present);
  EXPECT_TRUE(out.modified[1].slots[0].present);
  EXPECT_EQ(out.modified[1].slots[0].action, out.joint_action.per_agent[0]);
  EXPECT_EQ(out.contributors[1], ids({1}));
  EXPECT_EQ(out.acting_order, ids({1, 2}));
}

TEST(SequentialDecide, JointActionIsIndexedByAgentId) {
  const SlotLayout layout{1, 2};
  const PriorityRank rank(ids({2, 1}));
  const JointObservation obs{{{0.1}, {0.2}}};
  const ObservableSets sets{ids({2}), ids({1})};
  Rng policy_rng(1);
  Rng noise_rng(2);
  const auto out = sequential_decide(rank, obs, echo_policy, sets, kBox, layout, NoiseSpec{}, policy_rng, noise_rng);
  // Agent 2 acts first, without slots, on base observation 0.2.
  EXPECT_NEAR(out.joint_action.per_agent[1][0], std::tanh(0.2), 0.01);
  EXPECT_EQ(out.modified[0].slots[0].action, out.joint_action.per_agent[1]);
  EXPECT_EQ(out.acting_order, ids({2, 1}));
}

TEST(SequentialDecide, NeverSeesLowerPriorityActions) {
  Rng rng(77);
  TrafficScenario sc = default_traffic_scenario();
  GridTraffic env(sc, 4, 50);
  const SlotLayout layout{2, env.action_spec().encoded_dim()};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto obs = env.reset(static_cast<std::uint64_t>(trial));
    const auto sets = env.observable_sets(2);
    const PriorityRank rank = random_rank(4, rng);
    Rng noise_rng(5);
    const auto out =
        sequential_decide(rank, obs, echo_policy, sets, env.action_spec(), layout, NoiseSpec{}, rng, noise_rng);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto my_pos = rank.position_of(AgentId::from_index(i));
      for (AgentId j : out.contributors[i]) EXPECT_LT(rank.position_of(j), my_pos);
    }
  }
}

TEST(SequentialDecide, NoiseChangesSlotsButNotExecutedActions) {
  const SlotLayout layout{2, 2};
  const PriorityRank rank(ids({1, 2, 3}));
  const JointObservation obs{{{0.1}, {0.2}, {0.3}}};
  const ObservableSets sets{ids({2, 3}), ids({1, 3}), ids({1, 2})};
  // A constant policy isolates the effect of the noise on the slots.
  const DecisionPolicy constant = [](std::span<const double>, Rng&) {
    return ActionSample{{1.0, 0.1}, {0.0, 0.0}, -1.0};
  };
  Rng p1(3);
  Rng n1(4);
  const auto clean = sequential_decide(rank, obs, constant, sets, kBox, layout, NoiseSpec{0.0}, p1, n1);
  Rng p2(3);
  Rng n2(4);
  const auto noisy = sequential_decide(rank, obs, constant, sets, kBox, layout, NoiseSpec{0.1}, p2, n2);
  EXPECT_EQ(clean.joint_action.per_agent, noisy.joint_action.per_agent);
  EXPECT_NE(clean.modified[2].slots[0].action, noisy.modified[2].slots[0].action);
  EXPECT_TRUE(noisy.noise_applied[2]);
  EXPECT_FALSE(clean.noise_applied[2]);
  EXPECT_FALSE(noisy.noise_applied[0]);
}

TEST(InjectNoise, ZeroVarianceIsIdentity) {
  Rng rng(0);
  const std::vector<double> a{0.123456789, -1.5};
  const std::vector<double> max_abs{2.0, 0.25};
  EXPECT_EQ(inject_noise(a, NoiseSpec{0.0}, max_abs, rng), (Vector{0.123456789, -1.5}));
}

TEST(InjectNoise, EmpiricalVarianceMatchesFraction) {
  Rng rng(1);
  const std::vector<double> a{0.5, -0.1};
  const std::vector<double> max_abs{2.0, 0.25};
  constexpr int kSamples = 100'000;
  std::vector<double> sum(2, 0.0);
  std::vector<double> sum_sq(2, 0.0);
  for (int i = 0; i < kSamples; ++i) {
    const auto noisy = inject_noise(a, NoiseSpec{0.1}, max_abs, rng);
    for (std::size_t d = 0; d < 2; ++d) {
      const double e = noisy[d] - a[d];
      sum[d] += e;
      sum_sq[d] += e * e;
    }
  }
  for (std::size_t d = 0; d < 2; ++d) {
    const double target = 0.1 * max_abs[d];
    const double mean = sum[d] / kSamples;
    const double var = sum_sq[d] / kSamples - mean * mean;
    // The sample variance of a Gaussian has standard deviation sigma^2 sqrt(2 / n).
    EXPECT_LT(std::abs(var - target), 3.0 * target * std::sqrt(2.0 / kSamples));
  }
}

TEST(InjectNoise, ReproducibleUnderSeed) {
  Rng a(9);
  Rng b(9);
  const std::vector<double> x{0.0, 0.0};
  const std::vector<double> max_abs{2.0, 0.25};
  EXPECT_EQ(inject_noise(x, NoiseSpec{0.1}, max_abs, a), inject_noise(x, NoiseSpec{0.1}, max_abs, b));
}

TEST(PredictOpponentActions, EqualsOthersOwnMeanUnderSharing) {
  Rng rng(3);
  const SlotLayout layout{1, 2};
  Actor actor(3 + layout.width(), {8}, kBox);
  actor.initialize(rng, -0.5);
  actor.parameters() += Eigen::VectorXd::Random(actor.parameters().size());
  const JointObservation obs{{{0.4, 0.1, -0.2}, {0.4, 0.1, -0.2}}};
  const MeanPolicy mean = [&](std::span<const double> in) { return actor.mean_action(in); };
  const auto predicted = predict_opponent_actions(AgentId(1), obs, ids({2}), mean, kBox, layout);
  ASSERT_EQ(predicted.size(), 1u);
  const Vector own_input{0.4, 0.1, -0.2, 0.0, 0.0, 0.0};
  EXPECT_EQ(predicted[0].from, AgentId(2));
  EXPECT_EQ(predicted[0].encoded_action, actor.mean_action(own_input));
}

TEST(PredictOpponentActions, NavGameStraightPolicyPredictsStraight) {
  const ActionSpec discrete(DiscreteSpec{3});
  const SlotLayout layout{1, 3};
  const MeanPolicy straight = [](std::span<const double>) { return Vector{1.0}; };
  const JointObservation obs{{{}, {}}};
  const auto p1 = predict_opponent_actions(AgentId(1), obs, ids({2}), straight, discrete, layout);
  const auto p2 = predict_opponent_actions(AgentId(2), obs, ids({1}), straight, discrete, layout);
  EXPECT_EQ(p1[0].encoded_action, (Vector{0.0, 1.0, 0.0}));
  EXPECT_EQ(p2[0].encoded_action, (Vector{0.0, 1.0, 0.0}));
}

TEST(Pipeline, ModifiedObservationWidthIsTheSameForEveryWiring) {
  Rng rng(8);
  GridTraffic env(default_traffic_scenario(), 5, 20);
  const SlotLayout layout{2, env.action_spec().encoded_dim()};
  Actor decision(env.obs_dim() + layout.width(), {8}, env.action_spec());
  Actor priority(env.obs_dim(), {8}, ActionSpec(BoxSpec{{-1.0}, {1.0}}));
  decision.initialize(rng);
  priority.initialize(rng);
  const auto obs = env.reset(3);
  const auto sets = env.observable_sets(2);
  const std::vector<PipelineWiring> wirings{
      {PrioritySource::Learned, SlotSource::Propagated, {}},  {PrioritySource::None, SlotSource::Empty, {}},
      {PrioritySource::None, SlotSource::Predicted, {}},      {PrioritySource::Random, SlotSource::Propagated, {}},
      {PrioritySource::Learned, SlotSource::Propagated, {0.1}}};
  for (const auto& w : wirings) {
    StepStreams streams(4);
    const auto d = decide_step(w, obs, sets, PolicySet{&priority, &decision}, layout, ActMode::Stochastic, streams);
    for (const auto& m : d.decision.modified) EXPECT_EQ(m.dim(), env.obs_dim() + layout.width());
    EXPECT_EQ(d.priority.has_value(), w.learns_priorities());
  }
}

TEST(Pipeline, EmptySlotsStayZero) {
  Rng rng(8);
  GridTraffic env(default_traffic_scenario(), 3, 20);
  const SlotLayout layout{2, env.action_spec().encoded_dim()};
  Actor decision(env.obs_dim() + layout.width(), {8}, env.action_spec());
  decision.initialize(rng);
  const auto obs = env.reset(3);
  StepStreams streams(4);
  const auto d = decide_step({PrioritySource::None, SlotSource::Empty, {}}, obs, env.observable_sets(2),
                             PolicySet{nullptr, &decision}, layout, ActMode::Mean, streams);
  for (const auto& m : d.decision.modified) {
    for (const auto& s : m.slots) {
      EXPECT_FALSE(s.present);
      EXPECT_EQ(s.action, (Vector{0.0, 0.0}));
    }
  }
}
