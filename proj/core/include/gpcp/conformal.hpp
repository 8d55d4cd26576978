#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "gpcp/gp.hpp"
#include "gpcp/interval.hpp"

namespace gpcp {

// ---------------------------------------------------------------------------
// Order-statistic interval families. Each is built once per query point and
// can then be evaluated at any level; `at()` clamps every rank into [1, n],
// which is what level sweeps (IAE) use. The strict per-method functions
// further down reject levels the method cannot honour.
// ---------------------------------------------------------------------------

/// center ± q, q the ceil(alpha (m + 1))-th smallest of m residuals.
class ResidualBand {
 public:
  ResidualBand(double center, std::vector<double> residuals);

  [[nodiscard]] PredictionInterval at(double alpha) const;
  [[nodiscard]] double center() const noexcept { return center_; }
  [[nodiscard]] const std::vector<double>& sorted_residuals() const noexcept { return sorted_; }

 private:
  double center_;
  std::vector<double> sorted_;
};

/// [lower_(floor((n+1)(1-alpha))), upper_(ceil((n+1) alpha))] over two
/// independently sorted sequences.
class JackknifePlusBounds {
 public:
  JackknifePlusBounds(std::vector<double> lower, std::vector<double> upper);

  [[nodiscard]] PredictionInterval at(double alpha) const;
  [[nodiscard]] std::size_t size() const noexcept { return lower_.size(); }
  [[nodiscard]] const std::vector<double>& sorted_lower() const noexcept { return lower_; }
  [[nodiscard]] const std::vector<double>& sorted_upper() const noexcept { return upper_; }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// [xi_(floor((1-alpha)/2 (n+1))), xi_(floor((1+alpha)/2 (n+1)))] over one
/// sorted sequence.
class SignedJackknifeBounds {
 public:
  explicit SignedJackknifeBounds(std::vector<double> xi);

  [[nodiscard]] PredictionInterval at(double alpha) const;
  [[nodiscard]] const std::vector<double>& sorted() const noexcept { return xi_; }

 private:
  std::vector<double> xi_;
};

/// Full-conformal prediction set {z : gamma(z) <= ceil(alpha (n + 1))} for
/// one query point. gamma is piecewise constant in z; its breakpoints are
/// stored once and any level is answered by a threshold on the per-segment
/// counts.
class FullConformalSet {
 public:
  /// Score comparison i versus the candidate, as the product of two affine
  /// functions of z: score_i(z) <= score_{n+1}(z) iff
  /// (d0 + d1 z)(s0 + s1 z) <= 0.
  struct Comparison {
    double d0, d1, s0, s1;
  };

  FullConformalSet(double center, std::vector<Comparison> comparisons);

  /// Number of the n+1 scores not exceeding the candidate's, computed
  /// directly from the comparisons.
  [[nodiscard]] std::size_t gamma(double z) const;
  /// Membership test via the precomputed segments.
  [[nodiscard]] bool accepts(double z, double alpha) const;
  /// Maximal accepted intervals, ascending; bounds may be infinite.
  [[nodiscard]] std::vector<std::pair<double, double>> sub_intervals(double alpha) const;
  /// Convex hull of the accepted set; `contiguous` is false when it has gaps.
  [[nodiscard]] PredictionInterval at(double alpha) const;

  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] std::size_t training_size() const noexcept { return comparisons_.size(); }
  [[nodiscard]] double center() const noexcept { return center_; }

 private:
  [[nodiscard]] std::size_t threshold(double alpha) const;

  double center_;
  std::vector<Comparison> comparisons_;
  std::vector<double> breakpoints_;
  std::vector<std::size_t> segment_gamma_;  // one per open segment, size breakpoints + 1
};

// ---------------------------------------------------------------------------
// Generic conformal methods for any "fit on a dataset, predict at a point"
// regression routine.
// ---------------------------------------------------------------------------

using PointPredictor = std::function<double(PointView)>;
using FitFunction = std::function<PointPredictor(const Dataset&)>;

/// Predictor backed by a GP posterior mean at a fixed covariance.
[[nodiscard]] FitFunction gp_fit_function(CovarianceSpec spec, double nugget = kDefaultNugget);

/// Split conformal: fit on `train`, calibrate absolute residuals on `cal`.
class SplitConformal {
 public:
  SplitConformal(const Dataset& train, const Dataset& cal, const FitFunction& fit);

  [[nodiscard]] ResidualBand band(PointView x) const;
  /// Throws LevelError when ceil(alpha (m + 1)) > m for m calibration points.
  [[nodiscard]] PredictionInterval interval(PointView x, double alpha) const;
  [[nodiscard]] double predict(PointView x) const { return predictor_(x); }
  [[nodiscard]] const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  PointPredictor predictor_;
  std::vector<double> residuals_;
};

/// Jackknife and Jackknife+: one full fit and n leave-one-out fits.
class Jackknife {
 public:
  /// Throws DomainError when the dataset has fewer than two points.
  Jackknife(const Dataset& data, const FitFunction& fit);

  /// |Z_i - s(x_i; D without i)|.
  [[nodiscard]] const std::vector<double>& loo_residuals() const noexcept { return residuals_; }
  [[nodiscard]] double predict(PointView x) const { return full_(x); }
  [[nodiscard]] double predict_without(std::size_t i, PointView x) const { return loo_.at(i)(x); }

  [[nodiscard]] ResidualBand jcp_band(PointView x) const;
  [[nodiscard]] JackknifePlusBounds jplus_bounds(PointView x) const;
  /// Throws LevelError when ceil(alpha (n + 1)) > n.
  [[nodiscard]] PredictionInterval jcp(PointView x, double alpha) const;
  /// Throws LevelError when alpha > n / (n + 1).
  [[nodiscard]] PredictionInterval jplus(PointView x, double alpha) const;

 private:
  PointPredictor full_;
  std::vector<PointPredictor> loo_;
  std::vector<double> residuals_;
};

[[nodiscard]] PredictionInterval scp_interval(const Dataset& train, const Dataset& cal, const FitFunction& fit,
                                              PointView x, double alpha);
[[nodiscard]] PredictionInterval jcp_interval(const Dataset& data, const FitFunction& fit, PointView x,
                                              double alpha);
[[nodiscard]] PredictionInterval jplus_interval(const Dataset& data, const FitFunction& fit, PointView x,
                                                double alpha);

// ---------------------------------------------------------------------------
// GP-specific conformal methods with variance-normalized scores
//   R_i = (Z_i - m_{-i}(x_i)) / max(eps, sigma_{-i}(x_i)^beta).
// ---------------------------------------------------------------------------

struct ScoreConfig {
  double beta = 1.0;
  /// Defaults to 1e-8 times the model's prior standard deviation.
  std::optional<double> epsilon;

  /// Throws DomainError unless beta > 0 and epsilon >= 0.
  void validate() const;
  [[nodiscard]] double epsilon_for(const FittedGP& model) const;
};

/// LOO scores on the training data; absolute values unless `signed_scores`.
[[nodiscard]] std::vector<double> gp_loo_scores(const FittedGP& model, const ScoreConfig& cfg, bool signed_scores);

/// xi_i^±(x) = m_{-i}(x) ± R_i max(eps, sigma_{-i}(x)^beta).
[[nodiscard]] JackknifePlusBounds jplus_gp_bounds(const FittedGP& model, const ScoreConfig& cfg,
                                                  const KrigingPrediction& at_x);
/// xi_i(x) = m_{-i}(x) + R_i max(eps, sigma_{-i}(x)), R_i signed.
[[nodiscard]] SignedJackknifeBounds asym_jplus_gp_bounds(const FittedGP& model, const ScoreConfig& cfg,
                                                         const KrigingPrediction& at_x);
/// Exact full-conformal set with scores computed on the data augmented by
/// (x, z). `x` must differ from every training site.
[[nodiscard]] FullConformalSet fcp_gp_set(const FittedGP& model, const ScoreConfig& cfg, PointView x);
[[nodiscard]] FullConformalSet fcp_gp_set(const FittedGP& model, const ScoreConfig& cfg, PointView x,
                                          const KrigingPrediction& at_x);

/// Throws LevelError when alpha > n / (n + 1).
[[nodiscard]] PredictionInterval jplus_gp_interval(const FittedGP& model, const ScoreConfig& cfg, PointView x,
                                                   double alpha);
[[nodiscard]] PredictionInterval asym_jplus_gp_interval(const FittedGP& model, const ScoreConfig& cfg,
                                                        PointView x, double alpha);
/// Throws DomainError when x coincides with a training site.
[[nodiscard]] PredictionInterval fcp_gp_interval(const FittedGP& model, const ScoreConfig& cfg, PointView x,
                                                 double alpha);

}  // namespace gpcp
