#pragma once

#include <array>

#include "gpcp/types.hpp"

namespace gpcp {

/// Relative diagonal jitter added to kernel matrices, as a fraction of the
/// process variance.
inline constexpr double kDefaultNugget = 1e-10;

/// Anisotropic Matérn covariance with half-integer regularity nu = p + 1/2:
///
///   k(x, y) = variance * kappa_nu( sqrt(sum_i (x_i - y_i)^2 / rho_i^2) ).
class CovarianceSpec {
 public:
  /// Throws DomainError unless variance > 0, every lengthscale > 0 and p >= 1.
  CovarianceSpec(double variance, Vector lengthscales, int regularity_p);

  [[nodiscard]] double variance() const noexcept { return variance_; }
  [[nodiscard]] const Vector& lengthscales() const noexcept { return lengthscales_; }
  [[nodiscard]] int regularity_p() const noexcept { return p_; }
  [[nodiscard]] double nu() const noexcept { return p_ + 0.5; }
  [[nodiscard]] Index dim() const noexcept { return lengthscales_.size(); }

  [[nodiscard]] CovarianceSpec with_variance(double variance) const;

 private:
  double variance_;
  Vector lengthscales_;
  int p_;
};

/// Half-integer Matérn correlation kappa_{p+1/2}(h). Throws DomainError for
/// h < 0 or p < 1.
[[nodiscard]] double matern_correlation(double h, int p);

/// Throws DomainError when x, y and the lengthscales disagree in dimension.
[[nodiscard]] double covariance(const CovarianceSpec& spec, PointView x, PointView y);

/// n×n matrix with entries k(x_i, x_j) + nugget * variance * [i == j].
[[nodiscard]] Matrix gram_matrix(const CovarianceSpec& spec, const Design& points,
                                 double nugget = kDefaultNugget);

/// rows(a) × rows(b) matrix of k(a_i, b_j), no nugget.
[[nodiscard]] Matrix cross_covariance(const CovarianceSpec& spec, const Design& a, const Design& b);

/// Precomputed polynomial for kappa_{p+1/2}: exp(-c h) * sum_j coef_j (c h)^j,
/// c = sqrt(2 nu). Used by the assembly loops to avoid recomputing
/// factorial ratios.
class MaternCorrelation {
 public:
  explicit MaternCorrelation(int p);

  [[nodiscard]] double operator()(double h) const noexcept;
  [[nodiscard]] int p() const noexcept { return p_; }

 private:
  static constexpr int kMaxP = 64;
  int p_;
  double rate_;
  std::array<double, kMaxP + 1> coef_{};
};

}  // namespace gpcp
