#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "xpmarl/errors.hpp"
#include "xpmarl/learner/policy.hpp"
#include "xpmarl/oracles/reference.hpp"
#include "xpmarl/prioritization.hpp"

using namespace xpmarl;

namespace {

std::vector<int> values(const std::vector<AgentId>& ids) {
  std::vector<int> out;
  for (AgentId id : ids) out.push_back(id.value());
  return out;
}

Actor score_actor(std::size_t obs_dim) {
  return Actor(obs_dim, {8}, ActionSpec(BoxSpec{{-1.0}, {1.0}}));
}

JointObservation random_obs(std::size_t n, std::size_t dim, Rng& rng) {
  JointObservation obs;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(dim);
    for (auto& x : v) x = rng.normal();
    obs.per_agent.push_back(v);
  }
  return obs;
}

}  // namespace

TEST(ArgsortDesc, SortsDescendingWithOneBasedIds) {
  const std::vector<double> scores{0.2, 0.9, 0.5};
  EXPECT_EQ(values(argsort_desc(scores)), (std::vector<int>{2, 3, 1}));
}

TEST(ArgsortDesc, BreaksTiesByAscendingId) {
  const std::vector<double> scores{0.5, 0.5, 0.1};
  EXPECT_EQ(values(argsort_desc(scores)), (std::vector<int>{1, 2, 3}));
}

TEST(ArgsortDesc, MatchesPairwiseOracleOnRandomVectors) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> scores(6);
    for (auto& s : scores) s = std::round(rng.uniform() * 4.0) / 4.0;
    EXPECT_EQ(values(argsort_desc(scores)), oracles::rank_by_pairwise_count(scores));
  }
}

TEST(ArgsortDesc, RejectsNaN) {
  const std::vector<double> scores{0.1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(argsort_desc(scores), InvalidArgument);
}

TEST(PriorityRankType, RejectsNonPermutations) {
  EXPECT_THROW(PriorityRank({AgentId(1), AgentId(1)}), InvalidArgument);
  EXPECT_THROW(PriorityRank({AgentId(1), AgentId(3)}), InvalidArgument);
  EXPECT_NO_THROW(PriorityRank({AgentId(2), AgentId(1)}));
}

TEST(PriorityRankType, PositionOfAbsentAgentThrows) {
  const PriorityRank rank({AgentId(2), AgentId(1)});
  EXPECT_EQ(rank.position_of(AgentId(2)), 0u);
  EXPECT_EQ(rank.position_of(AgentId(1)), 1u);
  EXPECT_THROW(rank.position_of(AgentId(3)), InvalidArgument);
}

TEST(AssignPriorities, SingleAgentIsRejected) {
  Rng rng(0);
  Actor actor = score_actor(2);
  actor.initialize(rng);
  JointObservation obs{{{0.0, 0.0}}};
  EXPECT_THROW(assign_priorities(obs, actor, ActMode::Stochastic, rng), InvalidArgument);
}

TEST(AssignPriorities, ConstantScoresGiveIdentityRank) {
  Rng rng(0);
  Actor actor = score_actor(3);
  actor.parameters().setZero();
  const auto obs = random_obs(4, 3, rng);
  const auto result = assign_priorities(obs, actor, ActMode::Mean, rng);
  for (double s : result.scores) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(values(result.rank.order()), (std::vector<int>{1, 2, 3, 4}));
}

TEST(AssignPriorities, SameSeedSameRank) {
  Rng init(1);
  Actor actor = score_actor(3);
  actor.initialize(init, 0.0);
  const auto obs = random_obs(5, 3, init);
  Rng a(99);
  Rng b(99);
  const auto ra = assign_priorities(obs, actor, ActMode::Stochastic, a);
  const auto rb = assign_priorities(obs, actor, ActMode::Stochastic, b);
  EXPECT_EQ(ra.rank, rb.rank);
  EXPECT_EQ(ra.scores, rb.scores);
}

TEST(AssignPriorities, ScoresDependOnlyOnOwnObservation) {
  Rng init(2);
  Actor actor = score_actor(3);
  actor.initialize(init, 0.0);
  actor.parameters() += Eigen::VectorXd::Random(actor.parameters().size());
  auto obs = random_obs(4, 3, init);
  Rng r1(5);
  const auto before = assign_priorities(obs, actor, ActMode::Mean, r1);
  obs.per_agent[3] = {9.0, -9.0, 9.0};
  Rng r2(5);
  const auto after = assign_priorities(obs, actor, ActMode::Mean, r2);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(before.scores[i], after.scores[i]);
}

TEST(AssignPriorities, RankIsMonotoneAndBroadcastsEveryScore) {
  Rng rng(4);
  Actor actor = score_actor(2);
  actor.initialize(rng, 0.0);
  const auto obs = random_obs(7, 2, rng);
  const auto result = assign_priorities(obs, actor, ActMode::Stochastic, rng);
  ASSERT_EQ(result.broadcasts.size(), 7u);
  ASSERT_EQ(result.samples.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(result.broadcasts[i].sender, AgentId::from_index(i));
    EXPECT_EQ(result.broadcasts[i].score, result.scores[i]);
    EXPECT_GE(result.scores[i], -1.0);
    EXPECT_LE(result.scores[i], 1.0);
    EXPECT_TRUE(std::isfinite(result.samples[i].log_prob));
  }
  for (std::size_t k = 0; k + 1 < 7; ++k) {
    EXPECT_GE(result.scores[result.rank[k].index()], result.scores[result.rank[k + 1].index()]);
  }
}

TEST(AssignPriorities, TieOrderIndependentOfEvaluationOrder) {
  // Agents 2 and 4 see identical observations and therefore tie.
  Rng rng(6);
  Actor actor = score_actor(2);
  actor.initialize(rng, 0.0);
  JointObservation obs{{{0.3, 0.1}, {1.0, -1.0}, {-0.2, 0.5}, {1.0, -1.0}}};
  JointObservation swapped{{obs.per_agent[3], obs.per_agent[2], obs.per_agent[1], obs.per_agent[0]}};
  const auto a = assign_priorities(obs, actor, ActMode::Mean, rng);
  const auto b = assign_priorities(swapped, actor, ActMode::Mean, rng);
  // Relabel b back to the original ids (i <-> 5 - i) and compare tie handling.
  EXPECT_EQ(a.scores[1], a.scores[3]);
  const auto pos2 = a.rank.position_of(AgentId(2));
  const auto pos4 = a.rank.position_of(AgentId(4));
  EXPECT_LT(pos2, pos4);
  EXPECT_LT(b.rank.position_of(AgentId(1)), b.rank.position_of(AgentId(3)));
}

TEST(RandomRank, TwoAgentsAreUniform) {
  Rng rng(11);
  constexpr int kDraws = 10'000;
  int identity = 0;
  for (int i = 0; i < kDraws; ++i) {
    if (random_rank(2, rng)[0] == AgentId(1)) ++identity;
  }
  const double sigma = std::sqrt(kDraws * 0.25);
  EXPECT_LT(std::abs(identity - kDraws / 2.0), 3.0 * sigma);
}

TEST(RandomRank, SameSeedSamePermutation) {
  Rng a(21);
  Rng b(21);
  EXPECT_EQ(random_rank(4, a), random_rank(4, b));
}

TEST(RandomRank, AlwaysAPermutation) {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const auto rank = random_rank(4, rng);
    std::vector<int> ids = values(rank.order());
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, (std::vector<int>{1, 2, 3, 4}));
  }
}

TEST(RandomRank, RejectsSingleAgent) {
  Rng rng(0);
  EXPECT_THROW(random_rank(1, rng), InvalidArgument);
}
