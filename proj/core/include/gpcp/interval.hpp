#pragma once

#include <cstddef>

namespace gpcp {

/// Prediction interval at level `level`. Bounds may be infinite when a
/// conformal set is unbounded. `contiguous` is false only for full-conformal
/// sets with gaps; the bounds are then the convex hull.
///
/// `empty` marks a Jackknife+ set whose lower order statistic exceeds the
/// upper one (possible at low levels). Its bounds then both hold the
/// midpoint of the crossing; it has zero width and contains nothing.
struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  bool contiguous = true;
  bool empty = false;

  [[nodiscard]] double width() const noexcept { return empty ? 0.0 : upper - lower; }
  /// Closed-interval membership.
  [[nodiscard]] bool contains(double z) const noexcept { return !empty && lower <= z && z <= upper; }
  /// Set inclusion; the empty set is a subset of everything.
  [[nodiscard]] bool subset_of(const PredictionInterval& other) const noexcept {
    return empty || (!other.empty && other.lower <= lower && upper <= other.upper);
  }
};

/// Order-statistic ranks used by the conformal constructors, all one-based
/// and unclamped. A relative tolerance of 1e-9 absorbs floating-point noise
/// in products such as 0.6 * 5 before the floor/ceil.
namespace ranks {

/// ceil(alpha (m + 1)): the conformal quantile rank among m scores.
[[nodiscard]] std::size_t conformal(double alpha, std::size_t m);
/// floor((n + 1)(1 - alpha)): Jackknife+ lower rank.
[[nodiscard]] std::size_t jplus_lower(double alpha, std::size_t n);
/// ceil((n + 1) alpha): Jackknife+ upper rank.
[[nodiscard]] std::size_t jplus_upper(double alpha, std::size_t n);
/// floor((1 - alpha)/2 (n + 1)).
[[nodiscard]] std::size_t asym_lower(double alpha, std::size_t n);
/// floor((1 + alpha)/2 (n + 1)).
[[nodiscard]] std::size_t asym_upper(double alpha, std::size_t n);
/// Clamp a rank into [1, n].
[[nodiscard]] std::size_t clamp(std::size_t rank, std::size_t n);

}  // namespace ranks

/// Throws DomainError unless 0 < alpha < 1.
void check_level(double alpha);

}  // namespace gpcp
