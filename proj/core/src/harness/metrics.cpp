#include "xpmarl/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xpmarl/errors.hpp"

namespace xpmarl {

double quantile(std::span<const double> data, double q) {
  if (data.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const double> data) {
  Summary s;
  s.count = data.size();
  if (data.empty()) return s;
  s.min = quantile(data, 0.0);
  s.q1 = quantile(data, 0.25);
  s.median = quantile(data, 0.5);
  s.q3 = quantile(data, 0.75);
  s.max = quantile(data, 1.0);
  s.mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
  return s;
}

void MetricsReport::finalize() {
  std::vector<double> collisions;
  std::vector<double> speeds;
  for (const auto& e : episodes) {
    collisions.push_back(e.collision_rate);
    speeds.push_back(e.relative_average_speed);
  }
  collision_rate = summarize(collisions);
  relative_average_speed = summarize(speeds);
}

std::vector<double> sliding_window_mean(std::span<const double> series, std::size_t window) {
  if (window == 0) throw InvalidArgument("window must be positive");
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    const double sum = std::accumulate(series.begin() + static_cast<std::ptrdiff_t>(first),
                                       series.begin() + static_cast<std::ptrdiff_t>(i + 1), 0.0);
    out.push_back(sum / static_cast<double>(i + 1 - first));
  }
  return out;
}

double improvement_pct(double baseline, double value) {
  if (baseline == 0.0) throw InvalidArgument("improvement relative to a zero baseline is undefined");
  return (baseline - value) / baseline * 100.0;
}

}  // namespace xpmarl
