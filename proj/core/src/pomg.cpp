#include "xpmarl/pomg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xpmarl/errors.hpp"

namespace xpmarl {

ActionSpec::ActionSpec(BoxSpec box) : spec_(std::move(box)) {
  const auto& b = std::get<BoxSpec>(spec_);
  if (b.low.size() != b.high.size() || b.low.empty()) {
    throw ConfigError("box action spec needs matching, non-empty bounds");
  }
  for (std::size_t i = 0; i < b.low.size(); ++i) {
    if (!(b.low[i] < b.high[i])) throw ConfigError("box action spec needs low < high");
  }
}

ActionSpec::ActionSpec(DiscreteSpec discrete) : spec_(discrete) {
  if (discrete.num_actions < 2) throw ConfigError("discrete action spec needs >= 2 actions");
}

std::size_t ActionSpec::action_dim() const { return is_discrete() ? 1 : box().low.size(); }

std::size_t ActionSpec::encoded_dim() const {
  return is_discrete() ? static_cast<std::size_t>(num_actions()) : box().low.size();
}

std::vector<double> ActionSpec::encoded_max_abs() const {
  if (is_discrete()) return std::vector<double>(encoded_dim(), 1.0);
  const auto& b = box();
  std::vector<double> out(b.low.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(std::abs(b.low[i]), std::abs(b.high[i]));
  return out;
}

bool ActionSpec::contains(std::span<const double> action) const {
  if (action.size() != action_dim()) return false;
  if (is_discrete()) {
    const double a = action[0];
    return a == std::floor(a) && a >= 0.0 && a < num_actions();
  }
  const auto& b = box();
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (!(action[i] >= b.low[i] && action[i] <= b.high[i])) return false;
  }
  return true;
}

std::vector<double> ActionSpec::encode(std::span<const double> action) const {
  if (!is_discrete()) return {action.begin(), action.end()};
  std::vector<double> one_hot(encoded_dim(), 0.0);
  one_hot.at(static_cast<std::size_t>(action[0])) = 1.0;
  return one_hot;
}

std::vector<AgentTelemetry> TeamEnv::telemetry() const {
  return std::vector<AgentTelemetry>(static_cast<std::size_t>(num_agents()));
}

void TeamEnv::check_actions(const JointAction& actions) const {
  if (actions.size() != static_cast<std::size_t>(num_agents())) {
    throw BoundsViolation("joint action has " + std::to_string(actions.size()) + " entries, expected " +
                          std::to_string(num_agents()));
  }
  const auto& spec = action_spec();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!spec.contains(actions.per_agent[i])) {
      std::ostringstream msg;
      msg << "action of agent " << i + 1 << " outside its action spec: (";
      for (double v : actions.per_agent[i]) msg << v << ' ';
      msg << ')';
      throw BoundsViolation(msg.str());
    }
  }
}

}  // namespace xpmarl
