#pragma once

#include <vector>

#include "gpcp/interval.hpp"
#include "gpcp/kernel.hpp"
#include "gpcp/types.hpp"

namespace gpcp {

/// Design sites and noise-free observations. Rows must be pairwise distinct.
class Dataset {
 public:
  /// Throws DomainError on size mismatch, an empty design, non-finite
  /// entries or duplicated rows.
  Dataset(Design points, Vector values);

  [[nodiscard]] const Design& points() const noexcept { return points_; }
  [[nodiscard]] const Vector& values() const noexcept { return values_; }
  [[nodiscard]] Index size() const noexcept { return values_.size(); }
  [[nodiscard]] Index dim() const noexcept { return points_.cols(); }

  [[nodiscard]] Dataset without(Index i) const;
  [[nodiscard]] Dataset with_point(PointView x, double z) const;
  [[nodiscard]] Dataset with_values(Vector values) const;
  /// Rows [begin, begin + count).
  [[nodiscard]] Dataset slice(Index begin, Index count) const;

 private:
  Design points_;
  Vector values_;
};

struct LooPrediction {
  double mean = 0.0;
  double sd = 0.0;
};

/// Kriging weights lambda(x) with m_n(x) = lambda(x)ᵀ Z, plus the posterior
/// mean and variance at x.
struct KrigingPrediction {
  double mean = 0.0;
  double variance = 0.0;
  Vector weights;

  [[nodiscard]] double sd() const;
};

/// Batched kriging output for m query points: `weights` is n×m.
struct KrigingBatch {
  Vector mean;
  Vector variance;
  Matrix weights;
};

/// Exact GP interpolator with unknown constant mean (universal kriging).
/// Immutable after construction.
///
/// Leave-one-out quantities come from the inverse of the bordered system
/// [[K, 1], [1ᵀ, 0]]: with Q its inverse, the LOO residual at x_i is
/// (Q [Z; 0])_i / Q_ii and the LOO variance is 1/Q_ii minus the nugget.
/// Predictions of the model without point i at any x follow from the full
/// kriging weights:
///   m_{-i}(x)       = m(x) - lambda_i(x) r_i
///   sigma^2_{-i}(x) = sigma^2(x) + lambda_i(x)^2 / Q_ii
class FittedGP {
 public:
  /// Throws ConditioningError when the kernel matrix cannot be factorized.
  FittedGP(CovarianceSpec spec, Dataset data, double nugget = kDefaultNugget);

  [[nodiscard]] const CovarianceSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const Dataset& data() const noexcept { return data_; }
  [[nodiscard]] double nugget() const noexcept { return nugget_; }
  [[nodiscard]] Index size() const noexcept { return data_.size(); }
  /// Lower Cholesky factor of the kernel matrix.
  [[nodiscard]] const Matrix& chol() const noexcept { return chol_; }
  /// GLS estimate (1ᵀK⁻¹Z) / (1ᵀK⁻¹1).
  [[nodiscard]] double mean_hat() const noexcept { return mean_hat_; }
  /// K⁻¹(Z - mean_hat 1).
  [[nodiscard]] const Vector& alpha_weights() const noexcept { return alpha_; }

  [[nodiscard]] double posterior_mean(PointView x) const;
  /// Universal-kriging standard deviation, including the variance due to
  /// estimating the mean.
  [[nodiscard]] double posterior_sd(PointView x) const;
  [[nodiscard]] KrigingPrediction kriging(PointView x) const;
  [[nodiscard]] KrigingBatch kriging_batch(const Design& x) const;

  /// LOO mean and sd at each training site, as if point i were removed and
  /// the model refit with the same covariance.
  [[nodiscard]] const std::vector<LooPrediction>& loo_at_training() const noexcept { return loo_; }
  /// Z_i - m_{-i}(x_i).
  [[nodiscard]] const Vector& loo_residuals() const noexcept { return loo_residual_; }
  /// Diagonal of the bordered-system inverse restricted to the data block.
  [[nodiscard]] const Vector& loo_precision() const noexcept { return q_diag_; }

  /// Prediction at x from the model without point i (zero-based).
  [[nodiscard]] LooPrediction loo_predict(Index i, PointView x) const;
  /// Same, from kriging weights already computed at x.
  [[nodiscard]] LooPrediction loo_predict(Index i, const KrigingPrediction& at_x) const;

 private:
  void check_point(PointView x) const;
  [[nodiscard]] double variance_from(double prior, double quad, double one_dot) const;

  CovarianceSpec spec_;
  Dataset data_;
  double nugget_;
  Matrix chol_;
  Vector whitened_one_;  // L⁻¹ 1
  Vector kinv_one_;      // K⁻¹ 1
  double one_kinv_one_ = 0.0;
  double mean_hat_ = 0.0;
  Vector alpha_;
  Vector q_diag_;
  Vector loo_residual_;
  std::vector<LooPrediction> loo_;
};

/// Gaussian posterior interval m(x) ± Phi⁻¹((1 + alpha)/2) sigma(x).
[[nodiscard]] PredictionInterval gaussian_interval(const FittedGP& model, PointView x, double alpha);

/// Standard normal quantile.
[[nodiscard]] double normal_quantile(double p);

}  // namespace gpcp
