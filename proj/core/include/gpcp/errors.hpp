#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpcp {

/// Invalid argument: bad dimension, out-of-range level, coincident points.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky factorization broke down. `pivot()` is the zero-based column
/// whose diagonal became non-positive.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, std::ptrdiff_t pivot)
      : std::runtime_error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}

  [[nodiscard]] std::ptrdiff_t pivot() const noexcept { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

/// The requested level needs an order statistic beyond the available
/// scores, e.g. alpha > n/(n+1) for Jackknife+.
class LevelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace gpcp
