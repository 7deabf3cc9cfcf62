#pragma once

#include <span>
#include <vector>

namespace xpmarl {

struct AdvantageEstimate {
  std::vector<double> raw_advantages;
  std::vector<double> advantages;  // normalized (or raw when normalization is off)
  std::vector<double> returns;     // raw_advantages + values
};

/// Generalized advantage estimation over consecutive steps. `dones[t]` marks the
/// last step of an episode; the buffer must end on a done step. Throws
/// InvalidArgument on an empty or incomplete buffer.
AdvantageEstimate compute_gae(std::span<const double> rewards, std::span<const double> values,
                              const std::vector<bool>& dones, double gamma, double lambda,
                              bool normalize = true);

/// (x - mean) / std with the population standard deviation; a constant
/// vector maps to zeros.
std::vector<double> normalize_advantages(std::span<const double> advantages);

}  // namespace xpmarl
