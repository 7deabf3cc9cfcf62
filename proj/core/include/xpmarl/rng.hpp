#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace xpmarl {

/// Seeded random stream. All stochasticity in the library flows through
/// explicit Rng handles so that (seed, config) fixes every trajectory.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Independent child stream; depends only on this stream's seed and `stream`.
  [[nodiscard]] Rng derive(std::uint64_t stream) const;

  double uniform();  // [0, 1)
  double normal();   // standard normal
  double normal(double mean, double stddev);
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace xpmarl
