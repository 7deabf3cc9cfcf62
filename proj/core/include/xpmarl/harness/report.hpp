#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "xpmarl/harness/metrics.hpp"

namespace xpmarl {

struct VariantComparison {
  std::string variant;
  Summary collision_rate;
  Summary relative_average_speed;
  double collision_improvement_pct = 0.0;  // median reduction vs baseline
  double speed_change_pct = 0.0;           // median change vs baseline
};

/// Compares each report's medians against the report named `baseline`
/// (or the first report if absent).
std::vector<VariantComparison> compare_to_baseline(const std::vector<MetricsReport>& reports,
                                                   const std::string& baseline = "M2_vanilla");

std::string box_plot_svg(const std::string& title,
                         const std::vector<std::pair<std::string, Summary>>& boxes);

/// Writes comparison.csv, collision_rate.svg and relative_speed.svg.
std::vector<VariantComparison> emit_report(const std::vector<MetricsReport>& reports,
                                           const std::filesystem::path& out_dir);

}  // namespace xpmarl
