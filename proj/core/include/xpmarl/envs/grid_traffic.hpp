#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xpmarl/envs/polyline.hpp"
#include "xpmarl/pomg.hpp"

namespace xpmarl {

struct LaneSuccessor {
  int lane = 0;
  double s = 0.0;
};

struct LaneSpec {
  std::string name;
  std::vector<Point> points;
  bool closed = false;
  double half_width = 0.125;
  /// Where an open lane continues; open lanes without one wrap to their start.
  std::optional<LaneSuccessor> successor;
};

struct TrafficDynamics {
  double dt = 0.05;
  double v_max = 1.0;
  double radius = 0.06;
  double a_max = 2.0;
  double lateral_rate_max = 0.25;
};

struct TrafficReward {
  double speed_weight = 1.0;
  double collision_penalty = 2.0;
  double boundary_penalty = 0.5;
};

struct SpawnSpec {
  std::vector<int> lanes;  // empty: all lanes
  double min_separation = 0.3;
  double speed_min = 0.2;
  double speed_max = 0.6;
};

struct TrafficScenario {
  std::string name = "desk_traffic";
  std::vector<LaneSpec> lanes;
  TrafficDynamics dynamics;
  TrafficReward reward;
  SpawnSpec spawn;
  int num_agents = 4;
  int k_obs = 2;
  double obs_range = 3.0;
  double discount = 0.99;
  int horizon = 1200;
  std::vector<double> lookahead{0.5, 1.0};
};

/// Two-lane loop with an on-ramp merging into the outer lane and a 4-way
/// crossing through the loop.
TrafficScenario default_traffic_scenario();

struct VehicleState {
  int lane = 0;
  double s = 0.0;
  double offset = 0.0;  // lateral, positive to the left of the lane direction
  double speed = 0.0;
};

struct TrafficState {
  std::vector<VehicleState> vehicles;
  int step = 0;
};

inline constexpr std::size_t kEgoFeatures = 6;
inline constexpr std::size_t kNeighborFeatures = 6;

std::size_t traffic_obs_dim(int k_obs);

/// The k_obs agents nearest to `agent` (excluding itself) within `max_range`,
/// ties by ascending id. k_obs is capped at N - 1.
std::vector<AgentId> nearest_neighbors(const std::vector<Point>& positions, AgentId agent, int k_obs,
                                       double max_range);

/// Kinematic lane-following traffic. Actions per agent are
/// (acceleration, lateral offset rate).
class GridTraffic final : public TeamEnv {
 public:
  GridTraffic(TrafficScenario scenario, int num_agents, int horizon);
  explicit GridTraffic(TrafficScenario scenario);

  std::string name() const override { return "grid_traffic"; }
  int num_agents() const override { return num_agents_; }
  std::size_t obs_dim() const override { return traffic_obs_dim(scenario_.k_obs); }
  const ActionSpec& action_spec() const override { return spec_; }
  double discount() const override { return scenario_.discount; }
  int max_episode_steps() const override { return horizon_; }

  JointObservation reset(std::uint64_t seed) override;
  StepResult step(const JointAction& actions) override;
  ObservableSets observable_sets(int k_obs) const override;
  std::unique_ptr<TeamEnv> clone() const override;
  std::vector<AgentTelemetry> telemetry() const override;
  double max_speed() const override { return scenario_.dynamics.v_max; }

  const TrafficScenario& scenario() const { return scenario_; }
  const TrafficState& state() const { return state_; }
  void set_state(TrafficState state);

  std::vector<Point> positions() const;
  Point position_of(const VehicleState& v) const;
  double heading_of(const VehicleState& v) const;
  /// Per-agent: touching another agent (center distance < 2 radius).
  std::vector<bool> collision_flags() const;
  std::vector<bool> boundary_flags() const;
  JointObservation observe() const;
  Vector build_observation(AgentId agent) const;

  /// Reward of the current state for the step that produced it.
  double team_reward() const;

 private:
  void advance(VehicleState& v, double accel, double lateral_rate) const;

  TrafficScenario scenario_;
  std::vector<Polyline> lanes_;
  int num_agents_;
  int horizon_;
  ActionSpec spec_;
  TrafficState state_;
};

}  // namespace xpmarl
