#pragma once

#include <stdexcept>
#include <string>

namespace rfd {

/// Malformed or out-of-range user input (bad CSV row, invalid parameter).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point outside the domain of a function, e.g. a non-interior point passed
/// to the barrier objective. Callers are expected to backtrack.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The dispatch problem has no strictly feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfd
