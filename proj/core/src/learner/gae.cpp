#include "xpmarl/learner/gae.hpp"

#include <cmath>

#include "xpmarl/errors.hpp"

namespace xpmarl {

std::vector<double> normalize_advantages(std::span<const double> advantages) {
  const double n = static_cast<double>(advantages.size());
  std::vector<double> out(advantages.size(), 0.0);
  if (advantages.empty()) return out;
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / n);
  if (std < 1e-12) return out;
  for (std::size_t t = 0; t < advantages.size(); ++t) out[t] = (advantages[t] - mean) / std;
  return out;
}

AdvantageEstimate compute_gae(std::span<const double> rewards, std::span<const double> values,
                              const std::vector<bool>& dones, double gamma, double lambda,
                              bool normalize) {
  const std::size_t n = rewards.size();
  if (n == 0) throw InvalidArgument("cannot estimate advantages of an empty buffer");
  if (values.size() != n || dones.size() != n) {
    throw InvalidArgument("rewards, values and dones must have equal length");
  }
  if (!dones.back()) throw InvalidArgument("buffer must end with a completed episode");

  AdvantageEstimate out;
  out.raw_advantages.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = dones[t] ? 0.0 : values[t + 1];
    const double delta = rewards[t] + gamma * next_value - values[t];
    running = delta + (dones[t] ? 0.0 : gamma * lambda * running);
    out.raw_advantages[t] = running;
  }
  out.returns.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.returns[t] = out.raw_advantages[t] + values[t];
  out.advantages = normalize ? normalize_advantages(out.raw_advantages) : out.raw_advantages;
  return out;
}

}  // namespace xpmarl
