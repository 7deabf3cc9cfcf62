#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace xpmarl {

/// One row per (episode, step, agent).
struct TrajectoryRow {
  int episode = 0;
  int step = 0;
  int agent_id = 0;
  int rank_position = 0;  // 1-based
  double score = 0.0;     // priority score, 0 without learned priorities
  std::vector<int> propagated_from;
  bool noise_applied = false;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  bool in_collision = false;
  double team_reward = 0.0;
};

inline constexpr const char* kTrajectoryHeader =
    "episode,step,agent_id,rank_position,score,propagated_from,noise_applied,x,y,speed,"
    "in_collision,team_reward";

/// Doubles are written with round-trip precision.
void write_trajectory_row(std::ostream& out, const TrajectoryRow& row);
std::string format_double(double value);

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path);

}  // namespace xpmarl
