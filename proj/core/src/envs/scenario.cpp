#include "xpmarl/envs/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xpmarl/errors.hpp"

namespace xpmarl {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Point parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(where + ": points are [x, y] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

int lane_index(const std::vector<LaneSpec>& lanes, const json& ref, const std::string& where) {
  if (ref.is_number_integer()) {
    const int idx = ref.get<int>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= lanes.size()) throw ConfigError(where + ": lane index out of range");
    return idx;
  }
  if (ref.is_string()) {
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (lanes[i].name == ref.get<std::string>()) return static_cast<int>(i);
    }
    throw ConfigError(where + ": unknown lane '" + ref.get<std::string>() + "'");
  }
  throw ConfigError(where + ": lane references are names or indices");
}

NavGameScenario parse_nav(const json& doc) {
  require_known_keys(doc, {"schema_version", "kind", "payoff", "discount"}, "nav_game scenario");
  NavGameScenario sc;
  if (doc.contains("payoff")) {
    const auto& p = doc.at("payoff");
    if (!p.is_array() || p.size() != 3) throw ConfigError("payoff must be a 3x3 array");
    for (std::size_t r = 0; r < 3; ++r) {
      if (!p[r].is_array() || p[r].size() != 3) throw ConfigError("payoff must be a 3x3 array");
      for (std::size_t c = 0; c < 3; ++c) {
        if (!p[r][c].is_number()) throw ConfigError("payoff entries must be numbers");
        sc.payoff[r][c] = p[r][c].get<double>();
      }
    }
  }
  read_opt(doc, "discount", sc.discount, "scenario");
  if (!(sc.discount >= 0.0 && sc.discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  return sc;
}

TrafficScenario parse_traffic(const json& doc) {
  require_known_keys(doc,
                     {"schema_version", "kind", "name", "lanes", "dynamics", "reward", "spawn", "num_agents", "k_obs",
                      "obs_range", "discount", "horizon", "lookahead"},
                     "grid_traffic scenario");
  TrafficScenario sc;
  sc.lanes.clear();
  read_opt(doc, "name", sc.name, "scenario");
  if (!doc.contains("lanes") || !doc.at("lanes").is_array() || doc.at("lanes").empty()) {
    throw ConfigError("grid_traffic scenario needs a non-empty 'lanes' array");
  }
  for (const auto& lj : doc.at("lanes")) {
    require_known_keys(lj, {"name", "points", "closed", "half_width", "successor"}, "lane");
    LaneSpec lane;
    read_opt(lj, "name", lane.name, "lane");
    read_opt(lj, "closed", lane.closed, "lane");
    read_opt(lj, "half_width", lane.half_width, "lane");
    if (!lj.contains("points") || !lj.at("points").is_array()) throw ConfigError("lane '" + lane.name + "' needs points");
    for (const auto& pj : lj.at("points")) lane.points.push_back(parse_point(pj, "lane '" + lane.name + "'"));
    sc.lanes.push_back(std::move(lane));
  }
  const auto& lanes_json = doc.at("lanes");
  for (std::size_t i = 0; i < sc.lanes.size(); ++i) {
    if (!lanes_json[i].contains("successor")) continue;
    const auto& sj = lanes_json[i].at("successor");
    require_known_keys(sj, {"lane", "s"}, "successor");
    if (!sj.contains("lane")) throw ConfigError("successor needs a lane");
    LaneSuccessor succ;
    succ.lane = lane_index(sc.lanes, sj.at("lane"), "successor");
    read_opt(sj, "s", succ.s, "successor");
    sc.lanes[i].successor = succ;
  }
  if (doc.contains("dynamics")) {
    const auto& d = doc.at("dynamics");
    require_known_keys(d, {"dt", "v_max", "radius", "a_max", "lateral_rate_max"}, "dynamics");
    read_opt(d, "dt", sc.dynamics.dt, "dynamics");
    read_opt(d, "v_max", sc.dynamics.v_max, "dynamics");
    read_opt(d, "radius", sc.dynamics.radius, "dynamics");
    read_opt(d, "a_max", sc.dynamics.a_max, "dynamics");
    read_opt(d, "lateral_rate_max", sc.dynamics.lateral_rate_max, "dynamics");
  }
  if (doc.contains("reward")) {
    const auto& r = doc.at("reward");
    require_known_keys(r, {"speed_weight", "collision_penalty", "boundary_penalty"}, "reward");
    read_opt(r, "speed_weight", sc.reward.speed_weight, "reward");
    read_opt(r, "collision_penalty", sc.reward.collision_penalty, "reward");
    read_opt(r, "boundary_penalty", sc.reward.boundary_penalty, "reward");
  }
  if (doc.contains("spawn")) {
    const auto& s = doc.at("spawn");
    require_known_keys(s, {"lanes", "min_separation", "speed_min", "speed_max"}, "spawn");
    if (s.contains("lanes")) {
      if (!s.at("lanes").is_array()) throw ConfigError("spawn.lanes must be an array");
      for (const auto& ref : s.at("lanes")) sc.spawn.lanes.push_back(lane_index(sc.lanes, ref, "spawn.lanes"));
    }
    read_opt(s, "min_separation", sc.spawn.min_separation, "spawn");
    read_opt(s, "speed_min", sc.spawn.speed_min, "spawn");
    read_opt(s, "speed_max", sc.spawn.speed_max, "spawn");
    if (!(sc.spawn.speed_min >= 0.0 && sc.spawn.speed_min <= sc.spawn.speed_max)) {
      throw ConfigError("spawn speeds must satisfy 0 <= speed_min <= speed_max");
    }
  }
  read_opt(doc, "num_agents", sc.num_agents, "scenario");
  read_opt(doc, "k_obs", sc.k_obs, "scenario");
  read_opt(doc, "obs_range", sc.obs_range, "scenario");
  read_opt(doc, "discount", sc.discount, "scenario");
  read_opt(doc, "horizon", sc.horizon, "scenario");
  read_opt(doc, "lookahead", sc.lookahead, "scenario");
  if (sc.horizon < 1) throw ConfigError("horizon must be positive");
  if (!(sc.obs_range > 0.0)) throw ConfigError("obs_range must be positive");
  // Construct once so geometry errors surface at load time.
  try {
    GridTraffic probe(sc);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("scenario geometry: ") + e.what());
  }
  return sc;
}

json point_json(Point p) { return json::array({p.x, p.y}); }

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer()) {
    throw ConfigError("scenario lacks an integer schema_version");
  }
  if (doc.at("schema_version").get<int>() != kScenarioSchemaVersion) {
    throw ConfigError("unsupported scenario schema_version " + doc.at("schema_version").dump());
  }
  if (!doc.contains("kind") || !doc.at("kind").is_string()) throw ConfigError("scenario lacks a 'kind'");
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "nav_game") return parse_nav(doc);
  if (kind == "grid_traffic") return parse_traffic(doc);
  throw ConfigError("unknown scenario kind '" + kind + "'");
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_kind(const Scenario& scenario) {
  return std::holds_alternative<NavGameScenario>(scenario) ? "nav_game" : "grid_traffic";
}

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["kind"] = scenario_kind(scenario);
  if (const auto* nav = std::get_if<NavGameScenario>(&scenario)) {
    json rows = json::array();
    for (const auto& row : nav->payoff) rows.push_back(json(row));
    doc["payoff"] = rows;
    doc["discount"] = nav->discount;
    return doc.dump(2);
  }
  const auto& sc = std::get<TrafficScenario>(scenario);
  doc["name"] = sc.name;
  json lanes = json::array();
  for (const auto& lane : sc.lanes) {
    json lj;
    lj["name"] = lane.name;
    lj["closed"] = lane.closed;
    lj["half_width"] = lane.half_width;
    json pts = json::array();
    for (const auto& p : lane.points) pts.push_back(point_json(p));
    lj["points"] = pts;
    if (lane.successor) lj["successor"] = {{"lane", lane.successor->lane}, {"s", lane.successor->s}};
    lanes.push_back(lj);
  }
  doc["lanes"] = lanes;
  doc["dynamics"] = {{"dt", sc.dynamics.dt},
                     {"v_max", sc.dynamics.v_max},
                     {"radius", sc.dynamics.radius},
                     {"a_max", sc.dynamics.a_max},
                     {"lateral_rate_max", sc.dynamics.lateral_rate_max}};
  doc["reward"] = {{"speed_weight", sc.reward.speed_weight},
                   {"collision_penalty", sc.reward.collision_penalty},
                   {"boundary_penalty", sc.reward.boundary_penalty}};
  doc["spawn"] = {{"lanes", sc.spawn.lanes},
                  {"min_separation", sc.spawn.min_separation},
                  {"speed_min", sc.spawn.speed_min},
                  {"speed_max", sc.spawn.speed_max}};
  doc["num_agents"] = sc.num_agents;
  doc["k_obs"] = sc.k_obs;
  doc["obs_range"] = sc.obs_range;
  doc["discount"] = sc.discount;
  doc["horizon"] = sc.horizon;
  doc["lookahead"] = sc.lookahead;
  return doc.dump(2);
}

std::unique_ptr<TeamEnv> make_env(const Scenario& scenario, int num_agents, int horizon, int k_obs) {
  if (const auto* nav = std::get_if<NavGameScenario>(&scenario)) {
    if (num_agents > 0 && num_agents != 2) throw ConfigError("nav_game has exactly two agents");
    return std::make_unique<NavGame>(nav->payoff, nav->discount);
  }
  TrafficScenario sc = std::get<TrafficScenario>(scenario);
  if (k_obs > 0) sc.k_obs = k_obs;
  return std::make_unique<GridTraffic>(std::move(sc), num_agents, horizon);
}

}  // namespace xpmarl
