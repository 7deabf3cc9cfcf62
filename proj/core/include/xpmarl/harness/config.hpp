#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xpmarl/envs/scenario.hpp"
#include "xpmarl/harness/variant.hpp"
#include "xpmarl/learner/mappo.hpp"

namespace xpmarl {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  Variant variant = Variant::XpMarl;
  Scenario scenario = NavGameScenario{};
  std::string scenario_source;  // path as written in the config, informational
  int train_agents = 0;         // 0: scenario default
  int eval_agents = 0;
  std::vector<std::uint64_t> seeds{0};
  long train_env_steps = 100'000;
  int train_horizon = 0;  // 0: scenario default
  int eval_episodes = 32;
  int eval_horizon = 1200;
  int k_obs = 2;
  SlotOrder slot_order = SlotOrder::Priority;
  NoiseSpec noise{0.1};
  PpoHyperparameters priority_learner;
  PpoHyperparameters decision_learner;
};

/// Reads the versioned JSON config; a relative scenario path resolves against
/// the config file's directory. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& config);
/// Hash of the network shapes only; equal across variants of one setup.
std::uint64_t architecture_hash(const ExperimentConfig& config);

}  // namespace xpmarl
