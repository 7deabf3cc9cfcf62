#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "xpmarl/envs/polyline.hpp"
#include "xpmarl/value.hpp"

// Deliberately naive reference implementations used to cross-check the
// library. None of them call into the code they check.
namespace xpmarl::oracles {

/// 1-based ids ordered by descending score, ties by ascending id, computed by
/// counting for each agent how many others must precede it.
std::vector<int> rank_by_pairwise_count(std::span<const double> scores);

/// Agents strictly before `agent` in `order`, restricted to `obs_set`.
std::set<int> prefix_intersection(const std::vector<int>& order, int agent, const std::set<int>& obs_set);

/// Advantages by the definition A_t = delta_t + gamma * lambda * A_{t+1},
/// evaluated recursively and reset at episode ends.
std::vector<double> gae_by_recursion(const std::vector<double>& rewards, const std::vector<double>& values,
                                     const std::vector<bool>& dones, double gamma, double lambda);

/// 1-based ids of the k agents nearest to `agent` (1-based) within `range`,
/// found by repeated linear minimum search.
std::vector<int> nearest_by_selection(const std::vector<Point>& positions, int agent, int k, double range);

/// Plain nested-loop forward pass of a tanh MLP with a linear output layer.
/// Layer l stores W (out x in, column-major) followed by b.
std::vector<double> naive_mlp_forward(std::span<const double> params, const std::vector<std::size_t>& sizes,
                                      std::span<const double> input);

/// Density of a = low + (tanh(u) + 1) / 2 * (high - low) with u ~ N(mean, exp(log_std)^2),
/// by the change-of-variables formula evaluated naively.
double squashed_gaussian_log_density(std::span<const double> u, std::span<const double> mean,
                                     std::span<const double> log_std, std::span<const double> low,
                                     std::span<const double> high);

double categorical_log_prob(std::span<const double> logits, std::size_t symbol);

struct MatrixOptimum {
  double value = 0.0;
  std::vector<std::pair<int, int>> cells;  // all (row, col) attaining it
};

/// Best cell of a 3x3 team payoff by exhaustive enumeration.
MatrixOptimum enumerate_matrix_optimum(const PayoffTable& payoff);

}  // namespace xpmarl::oracles
