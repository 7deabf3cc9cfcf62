#pragma once

#include <stdexcept>
#include <string>

namespace xpmarl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration / scenario input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An action handed to an environment lies outside its action spec.
class BoundsViolation : public Error {
 public:
  using Error::Error;
};

/// A precondition of an algorithmic operation was violated (NaN score, agent
/// missing from a rank, too many propagated actions, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A loss or parameter became non-finite during learning. The message carries
/// a diagnostics dump.
class NumericalDivergence : public Error {
 public:
  using Error::Error;
};

}  // namespace xpmarl
