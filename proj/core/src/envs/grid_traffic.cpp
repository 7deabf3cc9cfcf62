#include "xpmarl/envs/grid_traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xpmarl/errors.hpp"

namespace xpmarl {

TrafficScenario default_traffic_scenario() {
  TrafficScenario sc;
  sc.name = "desk_traffic";
  auto rect = [](double h) { return std::vector<Point>{{-h, -h}, {h, -h}, {h, h}, {-h, h}}; };
  sc.lanes.push_back({"loop_inner", rect(1.2), true, 0.125, std::nullopt});
  sc.lanes.push_back({"loop_outer", rect(1.45), true, 0.125, std::nullopt});
  sc.lanes.push_back({"cross_ew", {{-2.2, 0.0}, {2.2, 0.0}}, false, 0.125, std::nullopt});
  sc.lanes.push_back({"cross_ns", {{0.0, -2.2}, {0.0, 2.2}}, false, 0.125, std::nullopt});
  // Merges into loop_outer's bottom edge at x = -0.6.
  sc.lanes.push_back({"on_ramp", {{-2.4, -1.85}, {-1.3, -1.85}, {-0.6, -1.45}}, false, 0.125, LaneSuccessor{1, 0.85}});
  return sc;
}

std::size_t traffic_obs_dim(int k_obs) {
  return kEgoFeatures + static_cast<std::size_t>(std::max(0, k_obs)) * kNeighborFeatures;
}

std::vector<AgentId> nearest_neighbors(const std::vector<Point>& positions, AgentId agent, int k_obs,
                                       double max_range) {
  const std::size_t self = agent.index();
  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j == self) continue;
    const double d = distance(positions.at(self), positions[j]);
    if (d <= max_range) candidates.emplace_back(d, j);
  }
  // Pairs compare by distance first, then by index.
  std::sort(candidates.begin(), candidates.end());
  const std::size_t k = std::min(candidates.size(), static_cast<std::size_t>(std::max(0, k_obs)));
  std::vector<AgentId> out;
  out.reserve(k);
  for (std::size_t m = 0; m < k; ++m) out.push_back(AgentId::from_index(candidates[m].second));
  return out;
}

namespace {

std::vector<Polyline> build_lanes(const TrafficScenario& sc) {
  if (sc.lanes.empty()) throw ConfigError("scenario '" + sc.name + "' has no lanes");
  std::vector<Polyline> lanes;
  lanes.reserve(sc.lanes.size());
  for (const auto& lane : sc.lanes) {
    if (!(lane.half_width > sc.dynamics.radius)) throw ConfigError("lane '" + lane.name + "' is narrower than a vehicle");
    lanes.emplace_back(lane.points, lane.closed);
  }
  for (const auto& lane : sc.lanes) {
    if (lane.successor && (lane.successor->lane < 0 || static_cast<std::size_t>(lane.successor->lane) >= lanes.size())) {
      throw ConfigError("lane '" + lane.name + "' names a missing successor");
    }
  }
  return lanes;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

}  // namespace

GridTraffic::GridTraffic(TrafficScenario scenario, int num_agents, int horizon)
    : scenario_(std::move(scenario)),
      lanes_(build_lanes(scenario_)),
      num_agents_(num_agents > 0 ? num_agents : scenario_.num_agents),
      horizon_(horizon > 0 ? horizon : scenario_.horizon),
      spec_(BoxSpec{{-scenario_.dynamics.a_max, -scenario_.dynamics.lateral_rate_max},
                    {scenario_.dynamics.a_max, scenario_.dynamics.lateral_rate_max}}) {
  if (num_agents_ < 2) throw ConfigError("grid traffic needs more than one agent");
  if (scenario_.k_obs < 1) throw ConfigError("k_obs must be at least 1");
  if (!(scenario_.discount >= 0.0 && scenario_.discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  const auto& d = scenario_.dynamics;
  if (!(d.dt > 0 && d.v_max > 0 && d.radius > 0 && d.a_max > 0 && d.lateral_rate_max > 0)) {
    throw ConfigError("traffic dynamics parameters must be positive");
  }
  for (int lane : scenario_.spawn.lanes) {
    if (lane < 0 || static_cast<std::size_t>(lane) >= lanes_.size()) throw ConfigError("spawn lane index out of range");
  }
  state_.vehicles.resize(static_cast<std::size_t>(num_agents_));
}

GridTraffic::GridTraffic(TrafficScenario scenario) : GridTraffic(std::move(scenario), 0, 0) {}

std::unique_ptr<TeamEnv> GridTraffic::clone() const { return std::make_unique<GridTraffic>(*this); }

Point GridTraffic::position_of(const VehicleState& v) const {
  const Polyline& lane = lanes_.at(static_cast<std::size_t>(v.lane));
  const Point c = lane.point_at(v.s);
  const double h = lane.heading_at(v.s);
  return {c.x - std::sin(h) * v.offset, c.y + std::cos(h) * v.offset};
}

double GridTraffic::heading_of(const VehicleState& v) const {
  return lanes_.at(static_cast<std::size_t>(v.lane)).heading_at(v.s);
}

std::vector<Point> GridTraffic::positions() const {
  std::vector<Point> out;
  out.reserve(state_.vehicles.size());
  for (const auto& v : state_.vehicles) out.push_back(position_of(v));
  return out;
}

void GridTraffic::set_state(TrafficState state) {
  if (state.vehicles.size() != static_cast<std::size_t>(num_agents_)) {
    throw InvalidArgument("traffic state has the wrong number of vehicles");
  }
  for (const auto& v : state.vehicles) {
    if (v.lane < 0 || static_cast<std::size_t>(v.lane) >= lanes_.size()) throw InvalidArgument("vehicle on a missing lane");
  }
  state_ = std::move(state);
}

JointObservation GridTraffic::reset(std::uint64_t seed) {
  Rng rng(seed);
  const auto& spawn = scenario_.spawn;
  std::vector<int> lanes = spawn.lanes;
  if (lanes.empty()) {
    lanes.resize(lanes_.size());
    std::iota(lanes.begin(), lanes.end(), 0);
  }
  state_ = TrafficState{};
  std::vector<Point> placed;
  for (int i = 0; i < num_agents_; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < 10'000 && !ok; ++attempt) {
      VehicleState v;
      v.lane = lanes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(lanes.size()) - 1))];
      v.s = rng.uniform() * lanes_[static_cast<std::size_t>(v.lane)].length();
      v.speed = spawn.speed_min + rng.uniform() * (spawn.speed_max - spawn.speed_min);
      const Point p = position_of(v);
      ok = std::all_of(placed.begin(), placed.end(),
                       [&](const Point& q) { return distance(p, q) >= spawn.min_separation; });
      if (ok) {
        placed.push_back(p);
        state_.vehicles.push_back(v);
      }
    }
    if (!ok) throw ConfigError("could not place " + std::to_string(num_agents_) + " agents in scenario '" + scenario_.name + "'");
  }
  return observe();
}

void GridTraffic::advance(VehicleState& v, double accel, double lateral_rate) const {
  const auto& d = scenario_.dynamics;
  v.speed = std::clamp(v.speed + accel * d.dt, 0.0, d.v_max);
  const auto& spec = scenario_.lanes[static_cast<std::size_t>(v.lane)];
  v.offset = std::clamp(v.offset + lateral_rate * d.dt, -spec.half_width, spec.half_width);
  v.s += v.speed * d.dt;
  const Polyline& lane = lanes_[static_cast<std::size_t>(v.lane)];
  if (v.s >= lane.length()) {
    if (!lane.closed() && spec.successor) {
      const double overflow = v.s - lane.length();
      v.lane = spec.successor->lane;
      v.s = lanes_[static_cast<std::size_t>(v.lane)].wrap(spec.successor->s + overflow);
      const double hw = scenario_.lanes[static_cast<std::size_t>(v.lane)].half_width;
      v.offset = std::clamp(v.offset, -hw, hw);
    } else {
      v.s = lane.wrap(v.s);
    }
  }
}

StepResult GridTraffic::step(const JointAction& actions) {
  check_actions(actions);
  for (std::size_t i = 0; i < state_.vehicles.size(); ++i) {
    advance(state_.vehicles[i], actions.per_agent[i][0], actions.per_agent[i][1]);
  }
  ++state_.step;
  StepResult result;
  result.observation = observe();
  result.team_reward = team_reward();
  result.done = state_.step >= horizon_;
  return result;
}

std::vector<bool> GridTraffic::collision_flags() const {
  const auto pos = positions();
  const double min_dist = 2.0 * scenario_.dynamics.radius;
  std::vector<bool> flags(pos.size(), false);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      if (distance(pos[i], pos[j]) < min_dist) flags[i] = flags[j] = true;
    }
  }
  return flags;
}

std::vector<bool> GridTraffic::boundary_flags() const {
  std::vector<bool> flags;
  flags.reserve(state_.vehicles.size());
  for (const auto& v : state_.vehicles) {
    const double hw = scenario_.lanes[static_cast<std::size_t>(v.lane)].half_width;
    flags.push_back(std::abs(v.offset) + scenario_.dynamics.radius > hw);
  }
  return flags;
}

double GridTraffic::team_reward() const {
  const auto& r = scenario_.reward;
  const double n = static_cast<double>(state_.vehicles.size());
  double speed = 0.0;
  for (const auto& v : state_.vehicles) speed += v.speed / scenario_.dynamics.v_max;
  const auto collisions = collision_flags();
  const bool any_collision = std::find(collisions.begin(), collisions.end(), true) != collisions.end();
  const auto boundary = boundary_flags();
  const double off_lane = static_cast<double>(std::count(boundary.begin(), boundary.end(), true));
  return r.speed_weight * speed / n - (any_collision ? r.collision_penalty : 0.0) - r.boundary_penalty * off_lane / n;
}

ObservableSets GridTraffic::observable_sets(int k_obs) const {
  const auto pos = positions();
  ObservableSets sets;
  sets.reserve(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    sets.push_back(nearest_neighbors(pos, AgentId::from_index(i), k_obs, scenario_.obs_range));
  }
  return sets;
}

Vector GridTraffic::build_observation(AgentId agent) const {
  const auto& v = state_.vehicles.at(agent.index());
  const auto& lane_spec = scenario_.lanes[static_cast<std::size_t>(v.lane)];
  const auto& dyn = scenario_.dynamics;
  const double hw = lane_spec.half_width;
  const double heading = heading_of(v);

  Vector obs;
  obs.reserve(obs_dim());
  obs.push_back(v.speed / dyn.v_max);
  obs.push_back(v.offset / hw);
  obs.push_back((hw - v.offset - dyn.radius) / hw);  // left boundary clearance
  obs.push_back((hw + v.offset - dyn.radius) / hw);  // right boundary clearance
  for (std::size_t k = 0; k < 2; ++k) {
    const double ahead = k < scenario_.lookahead.size() ? scenario_.lookahead[k] : 0.0;
    VehicleState probe = v;
    probe.s += ahead;
    const Polyline& lane = lanes_[static_cast<std::size_t>(probe.lane)];
    if (probe.s >= lane.length()) {
      if (!lane.closed() && lane_spec.successor) {
        const double overflow = probe.s - lane.length();
        probe.lane = lane_spec.successor->lane;
        probe.s = lanes_[static_cast<std::size_t>(probe.lane)].wrap(lane_spec.successor->s + overflow);
      } else {
        probe.s = lane.wrap(probe.s);
      }
    }
    obs.push_back(std::sin(wrap_angle(heading_of(probe) - heading)));
  }

  const auto pos = positions();
  const Point me = pos[agent.index()];
  const auto neighbors = nearest_neighbors(pos, agent, scenario_.k_obs, scenario_.obs_range);
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  for (int k = 0; k < scenario_.k_obs; ++k) {
    if (static_cast<std::size_t>(k) >= neighbors.size()) {
      obs.insert(obs.end(), kNeighborFeatures, 0.0);
      continue;
    }
    const auto& other = state_.vehicles[neighbors[static_cast<std::size_t>(k)].index()];
    const Point p = pos[neighbors[static_cast<std::size_t>(k)].index()];
    const double dx = p.x - me.x;
    const double dy = p.y - me.y;
    const double rel_heading = wrap_angle(heading_of(other) - heading);
    obs.push_back(1.0);
    obs.push_back(c * dx + s * dy);
    obs.push_back(-s * dx + c * dy);
    obs.push_back(other.speed / dyn.v_max);
    obs.push_back(std::cos(rel_heading));
    obs.push_back(std::sin(rel_heading));
  }
  return obs;
}

JointObservation GridTraffic::observe() const {
  JointObservation out;
  out.per_agent.reserve(state_.vehicles.size());
  for (std::size_t i = 0; i < state_.vehicles.size(); ++i) out.per_agent.push_back(build_observation(AgentId::from_index(i)));
  return out;
}

std::vector<AgentTelemetry> GridTraffic::telemetry() const {
  const auto pos = positions();
  const auto collisions = collision_flags();
  std::vector<AgentTelemetry> out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    out[i] = {pos[i].x, pos[i].y, state_.vehicles[i].speed, collisions[i]};
  }
  return out;
}

}  // namespace xpmarl
