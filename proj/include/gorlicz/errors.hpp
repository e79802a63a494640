#pragma once

#include <stdexcept>
#include <string>

namespace gorlicz {

/// Argument outside the mathematical domain of an operation (negative t, p < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Grid node index out of range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Caller misuse: mismatched grids, empty candidate lists, invalid solver steps, bad config.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative method failed to produce a finite/accurate result.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual = 0.0, long iteration = -1)
      : std::runtime_error(what), residual_(residual), iteration_(iteration) {}

  double residual() const noexcept { return residual_; }
  long iteration() const noexcept { return iteration_; }

 private:
  double residual_;
  long iteration_;
};

/// Malformed or unreadable field file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gorlicz
