#include "xpmarl/value.hpp"

#include <cmath>
#include <numeric>

#include "xpmarl/errors.hpp"

namespace xpmarl {

ValueEstimate monte_carlo_value(TeamEnv& env, const JointPolicy& policy, int num_rollouts,
                                std::uint64_t seed) {
  if (num_rollouts < 1) throw InvalidArgument("monte_carlo_value needs at least one rollout");
  const Rng root(seed);
  Rng policy_rng = root.derive(1);
  const double gamma = env.discount();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < num_rollouts; ++k) {
    JointObservation obs = env.reset(root.derive(1000 + static_cast<std::uint64_t>(k)).seed());
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < env.max_episode_steps(); ++t) {
      const StepResult result = env.step(policy(obs, policy_rng));
      ret += discount * result.team_reward;
      discount *= gamma;
      obs = result.observation;
      if (result.done) break;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  const double n = num_rollouts;
  const double mean = sum / n;
  ValueEstimate est;
  est.per_agent.assign(static_cast<std::size_t>(env.num_agents()), mean);
  est.num_rollouts = num_rollouts;
  if (num_rollouts > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    est.standard_error = std::sqrt(var / n);
  }
  return est;
}

namespace {
void check_distribution(std::span<const double> p, const char* which) {
  if (p.size() != 3) throw InvalidArgument(std::string(which) + " must have 3 entries");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw InvalidArgument(std::string(which) + " has a negative or NaN entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument(std::string(which) + " does not sum to 1");
}
}  // namespace

double exact_matrix_value(const PayoffTable& payoff, std::span<const double> policy_1,
                          std::span<const double> policy_2) {
  check_distribution(policy_1, "policy_1");
  check_distribution(policy_2, "policy_2");
  double value = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) value += policy_1[i] * policy_2[j] * payoff[i][j];
  }
  return value;
}

double joint_log_prob(std::span<const double> per_agent_log_probs) {
  return std::accumulate(per_agent_log_probs.begin(), per_agent_log_probs.end(), 0.0);
}

ZeroRewardEnv::ZeroRewardEnv(std::unique_ptr<TeamEnv> inner) : inner_(std::move(inner)) {}

std::string ZeroRewardEnv::name() const { return "zero_reward(" + inner_->name() + ")"; }

StepResult ZeroRewardEnv::step(const JointAction& actions) {
  StepResult result = inner_->step(actions);
  result.team_reward = 0.0;
  return result;
}

std::unique_ptr<TeamEnv> ZeroRewardEnv::clone() const {
  return std::make_unique<ZeroRewardEnv>(inner_->clone());
}

}  // namespace xpmarl
