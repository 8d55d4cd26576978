#include "gpcp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "gpcp/cholesky.hpp"
#include "gpcp/errors.hpp"

namespace gpcp {

Dataset::Dataset(Design points, Vector values) : points_(std::move(points)), values_(std::move(values)) {
  if (points_.rows() != values_.size()) {
    throw DomainError("dataset has " + std::to_string(points_.rows()) + " points but " +
                      std::to_string(values_.size()) + " values");
  }
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw DomainError("dataset must contain at least one point of dimension >= 1");
  }
  if (!points_.allFinite() || !values_.allFinite()) {
    throw DomainError("dataset contains non-finite entries");
  }
  for (Index i = 0; i < points_.rows(); ++i) {
    for (Index j = i + 1; j < points_.rows(); ++j) {
      if (points_.row(i) == points_.row(j)) {
        throw DomainError("dataset points " + std::to_string(i) + " and " + std::to_string(j) +
                          " coincide");
      }
    }
  }
}

Dataset Dataset::without(Index i) const {
  const Index n = size();
  if (i < 0 || i >= n) {
    throw DomainError("index out of range");
  }
  Design p(n - 1, dim());
  Vector v(n - 1);
  p.topRows(i) = points_.topRows(i);
  p.bottomRows(n - 1 - i) = points_.bottomRows(n - 1 - i);
  v.head(i) = values_.head(i);
  v.tail(n - 1 - i) = values_.tail(n - 1 - i);
  return Dataset(std::move(p), std::move(v));
}

Dataset Dataset::with_point(PointView x, double z) const {
  if (x.size() != dim()) {
    throw DomainError("point dimension mismatch");
  }
  Design p(size() + 1, dim());
  p.topRows(size()) = points_;
  p.row(size()) = x.transpose();
  Vector v(size() + 1);
  v.head(size()) = values_;
  v(size()) = z;
  return Dataset(std::move(p), std::move(v));
}

Dataset Dataset::with_values(Vector values) const { return Dataset(points_, std::move(values)); }

Dataset Dataset::slice(Index begin, Index count) const {
  if (begin < 0 || count < 1 || begin + count > size()) {
    throw DomainError("slice out of range");
  }
  return Dataset(points_.middleRows(begin, count), values_.segment(begin, count));
}

double KrigingPrediction::sd() const { return std::sqrt(std::max(variance, 0.0)); }

FittedGP::FittedGP(CovarianceSpec spec, Dataset data, double nugget)
    : spec_(std::move(spec)), data_(std::move(data)), nugget_(nugget) {
  if (data_.dim() != spec_.dim()) {
    throw DomainError("dataset dimension does not match covariance lengthscales");
  }
  const Index n = data_.size();
  chol_ = cholesky_lower(gram_matrix(spec_, data_.points(), nugget_));
  const auto lower = chol_.triangularView<Eigen::Lower>();

  whitened_one_ = lower.solve(Vector::Ones(n));
  kinv_one_ = chol_.transpose().triangularView<Eigen::Upper>().solve(whitened_one_);
  one_kinv_one_ = whitened_one_.squaredNorm();
  const Vector whitened_z = lower.solve(data_.values());
  mean_hat_ = whitened_one_.dot(whitened_z) / one_kinv_one_;
  alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(whitened_z - mean_hat_ * whitened_one_);

  const Matrix l_inv = lower.solve(Matrix::Identity(n, n));
  q_diag_.resize(n);
  loo_residual_.resize(n);
  loo_.resize(static_cast<std::size_t>(n));
  const double jitter = nugget_ * spec_.variance();
  for (Index i = 0; i < n; ++i) {
    q_diag_(i) = l_inv.col(i).squaredNorm() - kinv_one_(i) * kinv_one_(i) / one_kinv_one_;
    if (!(q_diag_(i) > 0.0)) {
      throw ConditioningError("leave-one-out system is singular", i);
    }
    loo_residual_(i) = alpha_(i) / q_diag_(i);
    const double var = 1.0 / q_diag_(i) - jitter;
    loo_[static_cast<std::size_t>(i)] = {data_.values()(i) - loo_residual_(i), std::sqrt(std::max(var, 0.0))};
  }
}

void FittedGP::check_point(PointView x) const {
  if (x.size() != data_.dim()) {
    throw DomainError("query point has dimension " + std::to_string(x.size()) + ", model has " +
                      std::to_string(data_.dim()));
  }
}

double FittedGP::variance_from(double prior, double quad, double one_dot) const {
  const double gap = 1.0 - one_dot;
  return std::max(prior - quad + gap * gap / one_kinv_one_, 0.0);
}

double FittedGP::posterior_mean(PointView x) const {
  check_point(x);
  Design q(1, x.size());
  q.row(0) = x.transpose();
  return mean_hat_ + cross_covariance(spec_, data_.points(), q).col(0).dot(alpha_);
}

double FittedGP::posterior_sd(PointView x) const { return kriging(x).sd(); }

KrigingPrediction FittedGP::kriging(PointView x) const {
  check_point(x);
  Design q(1, x.size());
  q.row(0) = x.transpose();
  KrigingBatch batch = kriging_batch(q);
  return {batch.mean(0), batch.variance(0), batch.weights.col(0)};
}

KrigingBatch FittedGP::kriging_batch(const Design& x) const {
  if (x.cols() != data_.dim()) {
    throw DomainError("query points have the wrong dimension");
  }
  const Matrix k = cross_covariance(spec_, data_.points(), x);
  const auto lower = chol_.triangularView<Eigen::Lower>();
  const Matrix v = lower.solve(k);

  KrigingBatch out;
  out.mean = (k.transpose() * alpha_).array() + mean_hat_;
  const Vector one_dot = v.transpose() * whitened_one_;
  out.variance.resize(x.rows());
  for (Index j = 0; j < x.rows(); ++j) {
    out.variance(j) = variance_from(spec_.variance(), v.col(j).squaredNorm(), one_dot(j));
  }
  out.weights = chol_.transpose().triangularView<Eigen::Upper>().solve(v);
  out.weights -= kinv_one_ * ((one_dot.array() - 1.0) / one_kinv_one_).matrix().transpose();
  return out;
}

LooPrediction FittedGP::loo_predict(Index i, PointView x) const { return loo_predict(i, kriging(x)); }

LooPrediction FittedGP::loo_predict(Index i, const KrigingPrediction& at_x) const {
  if (i < 0 || i >= size()) {
    throw DomainError("leave-one-out index out of range");
  }
  const double w = at_x.weights(i);
  const double var = std::max(at_x.variance, 0.0) + w * w / q_diag_(i);
  return {at_x.mean - w * loo_residual_(i), std::sqrt(var)};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal quantile needs p in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

PredictionInterval gaussian_interval(const FittedGP& model, PointView x, double alpha) {
  check_level(alpha);
  const KrigingPrediction pred = model.kriging(x);
  const double half = normal_quantile(0.5 * (1.0 + alpha)) * pred.sd();
  return {pred.mean - half, pred.mean + half, alpha, true};
}

}  // namespace gpcp
