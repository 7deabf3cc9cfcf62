#include "xpmarl/oracles/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "xpmarl/envs/grid_traffic.hpp"
#include "xpmarl/errors.hpp"
#include "xpmarl/learner/gae.hpp"
#include "xpmarl/learner/gradient_check.hpp"
#include "xpmarl/learner/mappo.hpp"
#include "xpmarl/oracles/reference.hpp"
#include "xpmarl/propagation.hpp"

namespace xpmarl::oracles {

namespace {

std::string format(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

SuiteResult finish(std::string name, std::size_t failures, std::size_t trials, const std::string& what) {
  SuiteResult r;
  r.name = std::move(name);
  r.passed = failures == 0;
  r.measured = static_cast<double>(failures);
  r.detail = std::to_string(failures) + " " + what + " in " + std::to_string(trials) + " trials";
  return r;
}

SuiteResult finish_error(std::string name, double worst, double tolerance, std::size_t trials) {
  SuiteResult r;
  r.name = std::move(name);
  r.passed = worst < tolerance;
  r.measured = worst;
  r.detail = "max error " + format(worst) + " (tolerance " + format(tolerance) + ") over " + std::to_string(trials) +
             " cases";
  return r;
}

void perturb(Eigen::VectorXd& params, Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] += rng.normal(0.0, scale);
}

Vector random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (auto& x : v) x = rng.normal(0.0, scale);
  return v;
}

}  // namespace

SuiteResult priority_rank_suite(std::size_t num_vectors, std::uint64_t seed) {
  Rng rng(seed);
  static constexpr double kTieValues[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::size_t failures = 0;
  for (std::size_t trial = 0; trial < num_vectors; ++trial) {
    const int n = rng.uniform_int(2, 16);
    const bool tie_heavy = rng.uniform() < 0.5;
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (auto& s : scores) s = tie_heavy ? kTieValues[rng.uniform_int(0, 4)] : rng.uniform() * 2.0 - 1.0;
    if (rng.uniform() < 0.1) std::fill(scores.begin(), scores.end(), scores.front());

    const auto ids = argsort_desc(scores);
    bool ok = ids.size() == scores.size();
    std::vector<bool> seen(scores.size(), false);
    for (AgentId id : ids) {
      ok = ok && id.value() >= 1 && id.value() <= n && !seen[id.index()];
      if (ok) seen[id.index()] = true;
    }
    for (std::size_t k = 0; ok && k + 1 < ids.size(); ++k) {
      ok = scores[ids[k].index()] >= scores[ids[k + 1].index()];
    }
    const auto oracle = rank_by_pairwise_count(scores);
    for (std::size_t k = 0; ok && k < ids.size(); ++k) ok = ids[k].value() == oracle[k];
    if (ok) {
      try {
        PriorityRank rank(ids);
        for (std::size_t k = 0; k < ids.size(); ++k) ok = ok && rank.position_of(ids[k]) == k;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) ++failures;
  }
  return finish("priority rank properties", failures, num_vectors, "violations");
}

SuiteResult propagation_causality_suite(std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t violations = 0;
  TrafficScenario scenario = default_traffic_scenario();
  for (std::size_t trial = 0; trial < steps; ++trial) {
    const int n = rng.uniform_int(2, 8);
    scenario.k_obs = rng.uniform_int(1, 3);
    GridTraffic env(scenario, n, 50);
    JointObservation obs = env.reset(rng.derive(trial).seed());
    // Advance a few steps so the configuration is not always a fresh spawn.
    const int warmup = rng.uniform_int(0, 5);
    for (int s = 0; s < warmup; ++s) {
      JointAction a;
      for (int i = 0; i < n; ++i) a.per_agent.push_back({rng.uniform() * 2.0 - 1.0, rng.uniform() * 0.2 - 0.1});
      obs = env.step(a).observation;
    }
    const SlotOrder slot_order = trial % 2 == 0 ? SlotOrder::Priority : SlotOrder::Neighbor;
    const SlotLayout layout{scenario.k_obs, env.action_spec().encoded_dim(), slot_order};
    Actor actor(env.obs_dim() + layout.width(), {16, 16}, env.action_spec());
    Rng init = rng.derive(1'000'000 + trial);
    actor.initialize(init, -0.5);
    perturb(actor.parameters(), init, 0.5);

    const PriorityRank rank = random_rank(static_cast<std::size_t>(n), rng);
    const ObservableSets sets = env.observable_sets(scenario.k_obs);
    const std::uint64_t step_seed = rng.derive(2'000'000 + trial).seed();
    const DecisionPolicy policy = [&](std::span<const double> in, Rng& r) { return actor.act(in, ActMode::Stochastic, r); };
    Rng policy_rng(step_seed);
    Rng noise_rng(step_seed + 1);
    const DecisionOutcome out = sequential_decide(rank, obs, policy, sets, env.action_spec(), layout, NoiseSpec{},
                                                  policy_rng, noise_rng);

    std::vector<int> order;
    for (AgentId id : rank.order()) order.push_back(id.value());
    for (int i = 1; i <= n; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i - 1);
      std::set<int> obs_set;
      for (AgentId j : sets[idx]) obs_set.insert(j.value());
      const std::set<int> expected = prefix_intersection(order, i, obs_set);
      std::set<int> got;
      for (AgentId j : out.contributors[idx]) got.insert(j.value());
      if (got != expected || out.contributors[idx].size() > static_cast<std::size_t>(scenario.k_obs)) ++violations;

      // Which agent, if any, owns each slot under this layout.
      const auto& slots = out.modified[idx].slots;
      std::vector<int> owner(slots.size(), 0);
      if (slot_order == SlotOrder::Priority) {
        for (std::size_t s = 0; s < out.contributors[idx].size() && s < owner.size(); ++s) {
          owner[s] = out.contributors[idx][s].value();
        }
      } else {
        for (std::size_t s = 0; s < sets[idx].size() && s < owner.size(); ++s) {
          if (expected.count(sets[idx][s].value()) != 0) owner[s] = sets[idx][s].value();
        }
      }
      for (std::size_t s = 0; s < slots.size(); ++s) {
        if (owner[s] != 0) {
          const auto executed =
              env.action_spec().encode(out.joint_action.per_agent[static_cast<std::size_t>(owner[s] - 1)]);
          if (!slots[s].present || slots[s].action != executed) ++violations;
        } else if (slots[s].present ||
                   std::any_of(slots[s].action.begin(), slots[s].action.end(), [](double v) { return v != 0.0; })) {
          ++violations;
        }
      }
    }

    // Policy swap after position p: agents before p must act identically.
    const std::size_t p = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    std::size_t calls = 0;
    const DecisionPolicy swapped = [&](std::span<const double> in, Rng& r) {
      ActionSample s = actor.act(in, ActMode::Stochastic, r);
      if (calls++ >= p) s.action = env.action_spec().box().low;
      return s;
    };
    Rng policy_rng2(step_seed);
    Rng noise_rng2(step_seed + 1);
    const DecisionOutcome replay = sequential_decide(rank, obs, swapped, sets, env.action_spec(), layout, NoiseSpec{},
                                                     policy_rng2, noise_rng2);
    for (std::size_t pos = 0; pos < p; ++pos) {
      const std::size_t idx = rank[pos].index();
      if (replay.joint_action.per_agent[idx] != out.joint_action.per_agent[idx]) ++violations;
    }
  }
  return finish("propagation causality", violations, steps, "violations");
}

namespace {

struct NetworkUnderTest {
  std::string label;
  std::size_t input_dim;
  std::vector<std::size_t> hidden;
  ActionSpec spec;
  std::size_t critic_input;
};

std::vector<NetworkUnderTest> networks_of(const ExperimentConfig& config) {
  auto env = make_env(config.scenario, config.train_agents, config.train_horizon, config.k_obs);
  const auto n = static_cast<std::size_t>(env->num_agents());
  const SlotLayout layout{config.k_obs, env->action_spec().encoded_dim()};
  const std::string kind = scenario_kind(config.scenario);
  std::vector<NetworkUnderTest> out;
  out.push_back({kind + " priority", env->obs_dim(), config.priority_learner.hidden, ActionSpec(BoxSpec{{-1.0}, {1.0}}),
                 n * env->obs_dim()});
  const std::size_t decision_in = env->obs_dim() + layout.width();
  out.push_back({kind + " decision", decision_in, config.decision_learner.hidden, env->action_spec(), n * decision_in});
  return out;
}

double check_network(const NetworkUnderTest& net, double epsilon, Rng& rng) {
  constexpr std::size_t kBatch = 6;
  Actor actor(net.input_dim, net.hidden, net.spec);
  actor.initialize(rng, -0.5);
  perturb(actor.parameters(), rng, 0.3);

  ActorBatch batch;
  batch.inputs.resize(static_cast<Eigen::Index>(net.input_dim), kBatch);
  batch.raw.resize(static_cast<Eigen::Index>(actor.raw_dim()), kBatch);
  batch.old_log_probs.resize(kBatch);
  batch.advantages.resize(kBatch);
  for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(kBatch); ++b) {
    const Vector in = random_vector(net.input_dim, rng);
    for (std::size_t i = 0; i < in.size(); ++i) batch.inputs(static_cast<Eigen::Index>(i), b) = in[i];
    const ActionSample s = actor.act(in, ActMode::Stochastic, rng);
    for (std::size_t i = 0; i < s.raw.size(); ++i) batch.raw(static_cast<Eigen::Index>(i), b) = s.raw[i];
    batch.old_log_probs[b] = s.log_prob + rng.normal(0.0, 0.05);
    batch.advantages[b] = rng.normal();
  }
  const auto actor_loss_fn = [&](const Eigen::VectorXd& p) { return actor_loss(actor, p, batch, 0.2, 0.01, nullptr).total; };
  const auto actor_grad_fn = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
    actor_loss(actor, p, batch, 0.2, 0.01, &g);
    return g;
  };
  double worst = gradient_check(actor_loss_fn, actor_grad_fn, actor.parameters(), epsilon).max_relative_error;

  Critic critic(net.critic_input, net.hidden);
  critic.initialize(rng);
  perturb(critic.parameters(), rng, 0.3);
  CriticBatch cb;
  cb.inputs.resize(static_cast<Eigen::Index>(net.critic_input), kBatch);
  cb.old_values.resize(kBatch);
  cb.returns.resize(kBatch);
  for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(kBatch); ++b) {
    const Vector in = random_vector(net.critic_input, rng);
    for (std::size_t i = 0; i < in.size(); ++i) cb.inputs(static_cast<Eigen::Index>(i), b) = in[i];
    cb.old_values[b] = critic.value(in) + rng.normal(0.0, 0.05);
    cb.returns[b] = rng.normal();
  }
  const auto critic_loss_fn = [&](const Eigen::VectorXd& p) { return critic_loss(critic, p, cb, 0.2, 0.5, nullptr); };
  const auto critic_grad_fn = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
    critic_loss(critic, p, cb, 0.2, 0.5, &g);
    return g;
  };
  worst = std::max(worst, gradient_check(critic_loss_fn, critic_grad_fn, critic.parameters(), epsilon).max_relative_error);
  return worst;
}

}  // namespace

SuiteResult gradient_suite(const std::vector<ExperimentConfig>& configs, double epsilon, double tolerance) {
  Rng rng(11);
  double worst = 0.0;
  std::size_t checked = 0;
  std::set<std::string> seen;
  for (const auto& config : configs) {
    for (const auto& net : networks_of(config)) {
      std::ostringstream key;
      key << net.input_dim << '/' << net.critic_input << '/' << net.spec.encoded_dim() << '/' << net.spec.is_discrete();
      for (auto h : net.hidden) key << '/' << h;
      if (!seen.insert(key.str()).second) continue;
      worst = std::max(worst, check_network(net, epsilon, rng));
      ++checked;
    }
  }
  return finish_error("gradient check (actor + critic)", worst, tolerance, checked);
}

SuiteResult gae_suite(std::size_t num_buffers, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < num_buffers; ++trial) {
    const int len = rng.uniform_int(1, 40);
    std::vector<double> rewards;
    std::vector<double> values;
    std::vector<bool> dones;
    for (int t = 0; t < len; ++t) {
      rewards.push_back(rng.normal(0.0, 3.0));
      values.push_back(rng.normal(0.0, 3.0));
      dones.push_back(t == len - 1 || rng.uniform() < 0.15);
    }
    const double gamma = trial % 10 == 0 ? 0.0 : rng.uniform();
    const double lambda = rng.uniform();
    const auto got = compute_gae(rewards, values, dones, gamma, lambda, false);
    const auto expected = gae_by_recursion(rewards, values, dones, gamma, lambda);
    for (std::size_t t = 0; t < expected.size(); ++t) {
      worst = std::max(worst, std::abs(got.raw_advantages[t] - expected[t]));
      worst = std::max(worst, std::abs(got.returns[t] - (expected[t] + values[t])));
    }
  }
  return finish_error("GAE vs recursive oracle", worst, 1e-9, num_buffers);
}

SuiteResult normalization_suite(std::size_t num_batches, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < num_batches; ++trial) {
    const int len = rng.uniform_int(2, 512);
    const double scale = std::exp(rng.normal(0.0, 2.0));
    const double shift = rng.normal(0.0, 100.0);
    std::vector<double> adv;
    for (int t = 0; t < len; ++t) adv.push_back(shift + scale * rng.normal());
    const auto norm = normalize_advantages(adv);
    const double mean = std::accumulate(norm.begin(), norm.end(), 0.0) / len;
    double var = 0.0;
    for (double a : norm) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / len);
    worst = std::max({worst, std::abs(mean), std::abs(sd - 1.0)});
  }
  return finish_error("advantage normalization", worst, 1e-6, num_batches);
}

SuiteResult factorization_suite(std::size_t num_samples, std::uint64_t seed) {
  Rng rng(seed);
  const ActionSpec box(BoxSpec{{-2.0, -0.25}, {2.0, 0.25}});
  const ActionSpec discrete(DiscreteSpec{3});
  constexpr std::size_t kInput = 7;
  const std::vector<std::size_t> hidden{16, 16};
  Actor box_actor(kInput, hidden, box);
  Actor discrete_actor(kInput, hidden, discrete);
  box_actor.initialize(rng, -0.5);
  discrete_actor.initialize(rng, -0.5);
  perturb(box_actor.parameters(), rng, 0.5);
  perturb(discrete_actor.parameters(), rng, 0.5);

  double worst = 0.0;
  for (std::size_t trial = 0; trial < num_samples; ++trial) {
    const Actor& actor = trial % 2 == 0 ? box_actor : discrete_actor;
    const int n = rng.uniform_int(2, 8);
    std::vector<double> per_agent;
    double oracle = 0.0;
    const std::vector<double> all(actor.parameters().data(), actor.parameters().data() + actor.parameters().size());
    std::vector<std::size_t> sizes{kInput};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(actor.action_spec().is_discrete() ? 3 : 2);
    for (int i = 0; i < n; ++i) {
      const Vector obs = random_vector(kInput, rng);
      const ActionSample s = actor.act(obs, ActMode::Stochastic, rng);
      per_agent.push_back(s.log_prob);
      const auto head = naive_mlp_forward(all, sizes, obs);
      if (actor.action_spec().is_discrete()) {
        oracle += categorical_log_prob(head, static_cast<std::size_t>(s.action[0]));
      } else {
        const std::vector<double> log_std{std::clamp(all[all.size() - 2], kLogStdMin, kLogStdMax),
                                          std::clamp(all[all.size() - 1], kLogStdMin, kLogStdMax)};
        oracle += squashed_gaussian_log_density(s.raw, head, log_std, box.box().low, box.box().high);
      }
    }
    worst = std::max(worst, std::abs(joint_log_prob(per_agent) - oracle));
  }
  return finish_error("joint log-probability factorization", worst, 1e-9, num_samples);
}

std::vector<ExperimentConfig> default_architecture_configs() {
  ExperimentConfig nav;
  nav.scenario = NavGameScenario{};
  nav.k_obs = 1;
  ExperimentConfig traffic;
  traffic.scenario = default_traffic_scenario();
  traffic.k_obs = 2;
  return {nav, traffic};
}

std::vector<SuiteResult> run_selftest_suites(const std::vector<ExperimentConfig>& configs,
                                             double gradient_tolerance) {
  std::vector<ExperimentConfig> all = default_architecture_configs();
  all.insert(all.end(), configs.begin(), configs.end());
  return {gradient_suite(all, 1e-5, gradient_tolerance),       gae_suite(),         normalization_suite(),
          priority_rank_suite(),     propagation_causality_suite(), factorization_suite()};
}

}  // namespace xpmarl::oracles
