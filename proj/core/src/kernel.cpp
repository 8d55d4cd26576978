#include "gpcp/kernel.hpp"

#include <cmath>
#include <string>

#include "gpcp/errors.hpp"

namespace gpcp {

namespace {

void check_dims(const CovarianceSpec& spec, Index d) {
  if (d != spec.dim()) {
    throw DomainError("point dimension " + std::to_string(d) + " does not match " +
                      std::to_string(spec.dim()) + " lengthscales");
  }
}

Design scaled(const CovarianceSpec& spec, const Design& points) {
  check_dims(spec, points.cols());
  Design out = points;
  for (Index j = 0; j < out.cols(); ++j) {
    out.col(j) /= spec.lengthscales()(j);
  }
  return out;
}

}  // namespace

CovarianceSpec::CovarianceSpec(double variance, Vector lengthscales, int regularity_p)
    : variance_(variance), lengthscales_(std::move(lengthscales)), p_(regularity_p) {
  if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
    throw DomainError("covariance variance must be positive and finite");
  }
  if (lengthscales_.size() == 0) {
    throw DomainError("covariance needs at least one lengthscale");
  }
  for (Index i = 0; i < lengthscales_.size(); ++i) {
    if (!(lengthscales_(i) > 0.0) || !std::isfinite(lengthscales_(i))) {
      throw DomainError("lengthscales must be positive and finite");
    }
  }
  if (p_ < 1) {
    throw DomainError("Matérn regularity p must be >= 1");
  }
}

CovarianceSpec CovarianceSpec::with_variance(double variance) const {
  return CovarianceSpec(variance, lengthscales_, p_);
}

MaternCorrelation::MaternCorrelation(int p) : p_(p) {
  if (p < 1 || p > kMaxP) {
    throw DomainError("Matérn regularity p must be in [1, " + std::to_string(kMaxP) + "]");
  }
  rate_ = std::sqrt(2.0 * p + 1.0);
  // coef_j = p! (2p - j)! / ((2p)! (p - j)! j!) * 2^j, built by its exact
  // term ratio so that coef_0 = 1.
  coef_[0] = 1.0;
  for (int j = 0; j < p; ++j) {
    coef_[j + 1] = coef_[j] * 2.0 * (p - j) / static_cast<double>((2 * p - j) * (j + 1));
  }
}

double MaternCorrelation::operator()(double h) const noexcept {
  const double t = rate_ * h;
  double poly = coef_[p_];
  for (int j = p_ - 1; j >= 0; --j) {
    poly = poly * t + coef_[j];
  }
  return std::exp(-t) * poly;
}

double matern_correlation(double h, int p) {
  if (!(h >= 0.0)) {
    throw DomainError("Matérn lag must be non-negative");
  }
  return MaternCorrelation(p)(h);
}

double covariance(const CovarianceSpec& spec, PointView x, PointView y) {
  check_dims(spec, x.size());
  check_dims(spec, y.size());
  const double h = ((x - y).array() / spec.lengthscales().array()).matrix().norm();
  return spec.variance() * MaternCorrelation(spec.regularity_p())(h);
}

Matrix gram_matrix(const CovarianceSpec& spec, const Design& points, double nugget) {
  if (!(nugget >= 0.0)) {
    throw DomainError("nugget must be non-negative");
  }
  const Design u = scaled(spec, points);
  const MaternCorrelation kappa(spec.regularity_p());
  const Index n = u.rows();
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = spec.variance() * (1.0 + nugget);
    for (Index i = j + 1; i < n; ++i) {
      const double v = spec.variance() * kappa((u.row(i) - u.row(j)).norm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix cross_covariance(const CovarianceSpec& spec, const Design& a, const Design& b) {
  const Design ua = scaled(spec, a);
  const Design ub = scaled(spec, b);
  const MaternCorrelation kappa(spec.regularity_p());
  Matrix k(ua.rows(), ub.rows());
  for (Index j = 0; j < ub.rows(); ++j) {
    for (Index i = 0; i < ua.rows(); ++i) {
      k(i, j) = spec.variance() * kappa((ua.row(i) - ub.row(j)).norm());
    }
  }
  return k;
}

}  // namespace gpcp
