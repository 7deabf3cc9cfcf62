#pragma once

#include <vector>

namespace xpmarl {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Piecewise-linear lane centerline parameterized by arc length.
class Polyline {
 public:
  Polyline(std::vector<Point> points, bool closed);

  double length() const { return cumulative_.back(); }
  bool closed() const { return closed_; }
  const std::vector<Point>& points() const { return points_; }

  /// Arc length wrapped into [0, length).
  double wrap(double s) const;
  Point point_at(double s) const;
  /// Heading (rad) of the segment containing s.
  double heading_at(double s) const;

 private:
  std::size_t segment_at(double s) const;

  std::vector<Point> points_;  // closed polylines repeat the first point at the end
  std::vector<double> cumulative_;
  bool closed_;
};

}  // namespace xpmarl
