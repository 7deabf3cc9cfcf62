#include "xpmarl/harness/trajectory_log.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "xpmarl/errors.hpp"

namespace xpmarl {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trajectory_row(std::ostream& out, const TrajectoryRow& row) {
  out << row.episode << ',' << row.step << ',' << row.agent_id << ',' << row.rank_position << ','
      << format_double(row.score) << ',';
  for (std::size_t i = 0; i < row.propagated_from.size(); ++i) {
    if (i > 0) out << ';';
    out << row.propagated_from[i];
  }
  out << ',' << (row.noise_applied ? 1 : 0) << ',' << format_double(row.x) << ',' << format_double(row.y) << ','
      << format_double(row.speed) << ',' << (row.in_collision ? 1 : 0) << ',' << format_double(row.team_reward)
      << '\n';
}

namespace {

template <typename T>
T parse_number(const std::string& field, const std::string& where) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ConfigError("malformed " + where + " field '" + field + "'");
  }
  return value;
}

}  // namespace

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw ConfigError(path.string() + " does not start with the trajectory header");
  }
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 12) throw ConfigError("trajectory row has " + std::to_string(f.size()) + " fields");
    TrajectoryRow r;
    r.episode = parse_number<int>(f[0], "episode");
    r.step = parse_number<int>(f[1], "step");
    r.agent_id = parse_number<int>(f[2], "agent_id");
    r.rank_position = parse_number<int>(f[3], "rank_position");
    r.score = parse_number<double>(f[4], "score");
    std::stringstream from(f[5]);
    while (std::getline(from, cell, ';')) r.propagated_from.push_back(parse_number<int>(cell, "propagated_from"));
    r.noise_applied = parse_number<int>(f[6], "noise_applied") != 0;
    r.x = parse_number<double>(f[7], "x");
    r.y = parse_number<double>(f[8], "y");
    r.speed = parse_number<double>(f[9], "speed");
    r.in_collision = parse_number<int>(f[10], "in_collision") != 0;
    r.team_reward = parse_number<double>(f[11], "team_reward");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace xpmarl
