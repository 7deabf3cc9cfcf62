#include "xpmarl/oracles/reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace xpmarl::oracles {

std::vector<int> rank_by_pairwise_count(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<int> order(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (scores[j] > scores[i] || (scores[j] == scores[i] && j < i)) ++ahead;
    }
    order[ahead] = static_cast<int>(i + 1);
  }
  return order;
}

std::set<int> prefix_intersection(const std::vector<int>& order, int agent, const std::set<int>& obs_set) {
  std::set<int> out;
  for (int id : order) {
    if (id == agent) break;
    if (obs_set.count(id)) out.insert(id);
  }
  return out;
}

namespace {

double gae_at(std::size_t t, const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<bool>& dones, double gamma, double lambda) {
  if (dones[t]) return rewards[t] - values[t];
  const double delta = rewards[t] + gamma * values[t + 1] - values[t];
  return delta + gamma * lambda * gae_at(t + 1, rewards, values, dones, gamma, lambda);
}

}  // namespace

std::vector<double> gae_by_recursion(const std::vector<double>& rewards, const std::vector<double>& values,
                                     const std::vector<bool>& dones, double gamma, double lambda) {
  std::vector<double> out;
  for (std::size_t t = 0; t < rewards.size(); ++t) out.push_back(gae_at(t, rewards, values, dones, gamma, lambda));
  return out;
}

std::vector<int> nearest_by_selection(const std::vector<Point>& positions, int agent, int k, double range) {
  const std::size_t self = static_cast<std::size_t>(agent - 1);
  std::vector<bool> taken(positions.size(), false);
  taken[self] = true;
  std::vector<int> out;
  for (int round = 0; round < k; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = positions.size();
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if (taken[j]) continue;
      const double dx = positions[j].x - positions[self].x;
      const double dy = positions[j].y - positions[self].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d <= range && d < best) {
        best = d;
        best_j = j;
      }
    }
    if (best_j == positions.size()) break;
    taken[best_j] = true;
    out.push_back(static_cast<int>(best_j + 1));
  }
  return out;
}

std::vector<double> naive_mlp_forward(std::span<const double> params, const std::vector<std::size_t>& sizes,
                                      std::span<const double> input) {
  std::vector<double> x(input.begin(), input.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t in = sizes[l];
    const std::size_t out = sizes[l + 1];
    const std::size_t bias = offset + in * out;
    std::vector<double> y(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      double acc = params[bias + r];
      for (std::size_t c = 0; c < in; ++c) acc += params[offset + c * out + r] * x[c];
      y[r] = l + 2 < sizes.size() ? std::tanh(acc) : acc;
    }
    offset = bias + out;
    x = std::move(y);
  }
  return x;
}

double squashed_gaussian_log_density(std::span<const double> u, std::span<const double> mean,
                                     std::span<const double> log_std, std::span<const double> low,
                                     std::span<const double> high) {
  double total = 0.0;
  for (std::size_t d = 0; d < u.size(); ++d) {
    const double sigma = std::exp(log_std[d]);
    const double z = (u[d] - mean[d]) / sigma;
    const double gaussian = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double t = std::tanh(u[d]);
    const double jacobian = 0.5 * (high[d] - low[d]) * (1.0 - t * t);
    total += std::log(gaussian / jacobian);
  }
  return total;
}

double categorical_log_prob(std::span<const double> logits, std::size_t symbol) {
  double denom = 0.0;
  for (double l : logits) denom += std::exp(l);
  return std::log(std::exp(logits[symbol]) / denom);
}

MatrixOptimum enumerate_matrix_optimum(const PayoffTable& payoff) {
  MatrixOptimum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double v = payoff[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (v > best.value) {
        best.value = v;
        best.cells.clear();
      }
      if (v == best.value) best.cells.emplace_back(r, c);
    }
  }
  return best;
}

}  // namespace xpmarl::oracles
