#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>

#include "xpmarl/envs/grid_traffic.hpp"
#include "xpmarl/envs/nav_game.hpp"

namespace xpmarl {

inline constexpr int kScenarioSchemaVersion = 1;

struct NavGameScenario {
  PayoffTable payoff = default_nav_payoff();
  double discount = 0.99;
};

using Scenario = std::variant<NavGameScenario, TrafficScenario>;

/// Parses a versioned scenario document (JSON). Throws ConfigError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);

std::string scenario_kind(const Scenario& scenario);

/// num_agents / horizon <= 0 keep the scenario's own values.
std::unique_ptr<TeamEnv> make_env(const Scenario& scenario, int num_agents = 0, int horizon = 0,
                                  int k_obs = 0);

}  // namespace xpmarl
