#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace xpmarl {

struct EpisodeMetrics {
  std::uint64_t train_seed = 0;
  int episode = 0;
  std::uint64_t eval_seed = 0;
  long steps = 0;
  long collision_steps = 0;
  double collision_rate = 0.0;           // steps with >= 1 collision / steps
  double relative_average_speed = 0.0;   // mean over agents and steps of speed / v_max
};

struct Summary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

/// Linear-interpolated quantile of unsorted data, q in [0, 1].
double quantile(std::span<const double> data, double q);
Summary summarize(std::span<const double> data);

struct MetricsReport {
  std::string variant;
  std::vector<EpisodeMetrics> episodes;
  Summary collision_rate;
  Summary relative_average_speed;

  void finalize();  // recomputes the summaries from `episodes`
};

/// Trailing moving average; the first window-1 points average what exists.
std::vector<double> sliding_window_mean(std::span<const double> series, std::size_t window);

/// Relative reduction of `value` versus `baseline` in percent.
double improvement_pct(double baseline, double value);

}  // namespace xpmarl
