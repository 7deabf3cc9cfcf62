#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xpmarl/harness/config.hpp"

namespace xpmarl::oracles {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double measured = 0.0;  // worst error or violation count
};

/// Random score vectors (N in 2..16, with ties and duplicates) through
/// argsort_desc and PriorityRank, against the pairwise-count oracle.
SuiteResult priority_rank_suite(std::size_t num_vectors = 100'000, std::uint64_t seed = 5);

/// Seeded grid-traffic steps with random ranks and k_obs in {1, 2, 3}:
/// contributors must equal the prefix-intersection oracle, every flagged slot
/// must hold the contributor's executed action bit for bit, and changing the
/// policy after an agent has acted must not change that agent's action.
SuiteResult propagation_causality_suite(std::size_t steps = 1'000, std::uint64_t seed = 6);

/// Gradient checks of the actor (PPO surrogate + entropy) and critic (clipped
/// value loss) losses of every network a config instantiates.
SuiteResult gradient_suite(const std::vector<ExperimentConfig>& configs, double epsilon = 1e-5,
                           double tolerance = 1e-4);

/// compute_gae against the recursive oracle (1e-9) and normalization (1e-6).
SuiteResult gae_suite(std::size_t num_buffers = 2'000, std::uint64_t seed = 7);
SuiteResult normalization_suite(std::size_t num_batches = 2'000, std::uint64_t seed = 8);

/// Joint log-probabilities of sampled joint actions against the sum of
/// independently computed per-agent densities (1e-9).
SuiteResult factorization_suite(std::size_t num_samples = 10'000, std::uint64_t seed = 9);

/// The shipped nav_game and grid_traffic setups with default hyperparameters.
std::vector<ExperimentConfig> default_architecture_configs();

/// Every suite; the gradient suite covers the default setups plus `configs`.
std::vector<SuiteResult> run_selftest_suites(const std::vector<ExperimentConfig>& configs = {},
                                             double gradient_tolerance = 1e-4);

}  // namespace xpmarl::oracles
