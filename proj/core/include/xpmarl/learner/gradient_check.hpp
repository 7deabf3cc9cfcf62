#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace xpmarl {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;
using GradientFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Compares the analytic gradient with central differences on every
/// coordinate. Relative error is |a - n| / max(|a|, |n|, floor).
/// Throws InvalidArgument unless epsilon is in [1e-7, 1e-3].
GradientCheckResult gradient_check(const ScalarFunction& loss, const GradientFunction& gradient,
                                   const Eigen::VectorXd& point, double epsilon,
                                   double floor = 1e-3);

}  // namespace xpmarl
