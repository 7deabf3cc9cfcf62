#include "xpmarl/envs/polyline.hpp"

#include <algorithm>
#include <cmath>

#include "xpmarl/errors.hpp"

namespace xpmarl {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Polyline::Polyline(std::vector<Point> points, bool closed) : points_(std::move(points)), closed_(closed) {
  if (points_.size() < 2) throw ConfigError("a lane polyline needs at least two points");
  if (closed_) points_.push_back(points_.front());
  cumulative_.assign(1, 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double len = distance(points_[i - 1], points_[i]);
    if (len <= 0.0) throw ConfigError("a lane polyline has a zero-length segment");
    cumulative_.push_back(cumulative_.back() + len);
  }
}

double Polyline::wrap(double s) const {
  const double len = length();
  double w = std::fmod(s, len);
  if (w < 0.0) w += len;
  return w >= len ? 0.0 : w;
}

std::size_t Polyline::segment_at(double s) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  return std::clamp<std::size_t>(idx, 1, cumulative_.size() - 1) - 1;
}

Point Polyline::point_at(double s) const {
  s = wrap(s);
  const std::size_t k = segment_at(s);
  const double t = (s - cumulative_[k]) / (cumulative_[k + 1] - cumulative_[k]);
  return {points_[k].x + t * (points_[k + 1].x - points_[k].x), points_[k].y + t * (points_[k + 1].y - points_[k].y)};
}

double Polyline::heading_at(double s) const {
  const std::size_t k = segment_at(wrap(s));
  return std::atan2(points_[k + 1].y - points_[k].y, points_[k + 1].x - points_[k].x);
}

}  // namespace xpmarl
