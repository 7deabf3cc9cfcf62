#include "xpmarl/learner/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "xpmarl/errors.hpp"

namespace xpmarl {

GradientCheckResult gradient_check(const ScalarFunction& loss, const GradientFunction& gradient,
                                   const Eigen::VectorXd& point, double epsilon, double floor) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw InvalidArgument("gradient_check epsilon must lie in [1e-7, 1e-3]");
  }
  const Eigen::VectorXd analytic = gradient(point);
  if (analytic.size() != point.size()) throw InvalidArgument("gradient has the wrong size");
  GradientCheckResult result;
  Eigen::VectorXd probe = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + epsilon;
    const double up = loss(probe);
    probe[i] = point[i] - epsilon;
    const double down = loss(probe);
    probe[i] = point[i];
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    const double err = std::abs(analytic[i] - numeric) / denom;
    if (!(err <= result.max_relative_error)) {  // also catches NaN
      result.max_relative_error = std::isnan(err) ? INFINITY : err;
      result.worst_index = static_cast<std::size_t>(i);
      result.analytic_at_worst = analytic[i];
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}

}  // namespace xpmarl
