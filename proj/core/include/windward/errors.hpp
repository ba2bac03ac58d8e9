#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace windward {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scope became empty after intersection with the global grid.
struct DegenerateScopeError : Error {
  using Error::Error;
};

/// Requested the jump-target scope of a state that has no successor
/// waypoint (the terminal arrive→standby transition).
struct NoSuccessorError : Error {
  using Error::Error;
};

/// Goal-minus-unsafe is empty inside the scope; the modal game is vacuous.
struct EmptyGoalError : Error {
  using Error::Error;
};

/// Policy lookup outside the winning region or realized stage range.
struct OutOfDomainError : Error {
  using Error::Error;
};

/// Scope extension exhausted its retry budget without a robust start.
struct UnsolvableError : Error {
  UnsolvableError(const std::string& what, std::size_t last_winning, int attempts)
      : Error(what), last_winning_count(last_winning), attempts(attempts) {}
  std::size_t last_winning_count = 0;
  int attempts = 0;
};

}  // namespace windward
