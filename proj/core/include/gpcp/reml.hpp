#pragma once

#include <limits>
#include <vector>

#include "gpcp/gp.hpp"
#include "gpcp/kernel.hpp"

namespace gpcp {

/// Multi-start restricted-likelihood search over log-lengthscales.
struct SearchConfig {
  int n_starts = 8;
  /// Objective evaluations per local search.
  int max_evals = 400;
  double f_tolerance = 1e-7;
  double x_tolerance = 1e-5;
  double nugget = kDefaultNugget;
};

/// Restricted log-likelihood of the constant-mean model at a fully specified
/// covariance:
///   -1/2 [ (n-1) log 2pi + log det K + log(1ᵀK⁻¹1) + (Z - m 1)ᵀK⁻¹(Z - m 1) ].
/// Throws ConditioningError when K cannot be factorized.
[[nodiscard]] double restricted_log_likelihood(const Dataset& data, const CovarianceSpec& spec,
                                               double nugget = kDefaultNugget);

struct ProfiledReml {
  bool ok = false;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  /// Closed-form variance maximizing the restricted likelihood.
  double variance = 0.0;
  Index failed_pivot = -1;
};

/// Restricted log-likelihood with the variance profiled out, at the given
/// log-lengthscales and regularity p.
[[nodiscard]] ProfiledReml profiled_reml(const Dataset& data, const Vector& log_lengthscales, int p,
                                         double nugget = kDefaultNugget);

struct RemlStart {
  Vector log_lengthscales;
  double log_likelihood;
};

struct RemlResult {
  CovarianceSpec spec;
  double log_likelihood;
  std::vector<RemlStart> starts;
  int evaluations;
};

/// Deterministic start points: the centre of the search box followed by a
/// Halton sequence. The box per dimension is
/// [log(range / (10 n^{1/d})), log(10 range)].
[[nodiscard]] std::vector<Vector> reml_start_points(const Dataset& data, const SearchConfig& search);

/// Requires n > d + 1. Throws ConditioningError if every start fails.
[[nodiscard]] RemlResult reml_fit(const Dataset& data, int p, const SearchConfig& search = {});

[[nodiscard]] CovarianceSpec reml_select(const Dataset& data, int p, const SearchConfig& search = {});

}  // namespace gpcp
