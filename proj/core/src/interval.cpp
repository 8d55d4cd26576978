#include "gpcp/interval.hpp"

#include <algorithm>
#include <cmath>

#include "gpcp/errors.hpp"

namespace gpcp {

namespace {

constexpr double kRankTolerance = 1e-9;

std::size_t floor_rank(double x) {
  return static_cast<std::size_t>(std::max(0.0, std::floor(x * (1.0 + kRankTolerance))));
}

std::size_t ceil_rank(double x) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(x * (1.0 - kRankTolerance))));
}

}  // namespace

namespace ranks {

std::size_t conformal(double alpha, std::size_t m) { return ceil_rank(alpha * static_cast<double>(m + 1)); }

std::size_t jplus_lower(double alpha, std::size_t n) {
  return floor_rank((1.0 - alpha) * static_cast<double>(n + 1));
}

std::size_t jplus_upper(double alpha, std::size_t n) { return ceil_rank(alpha * static_cast<double>(n + 1)); }

std::size_t asym_lower(double alpha, std::size_t n) {
  return floor_rank((1.0 - alpha) / 2.0 * static_cast<double>(n + 1));
}

std::size_t asym_upper(double alpha, std::size_t n) {
  return floor_rank((1.0 + alpha) / 2.0 * static_cast<double>(n + 1));
}

std::size_t clamp(std::size_t rank, std::size_t n) { return std::clamp<std::size_t>(rank, 1, std::max<std::size_t>(n, 1)); }

}  // namespace ranks

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("level alpha must lie in (0, 1)");
  }
}

}  // namespace gpcp
