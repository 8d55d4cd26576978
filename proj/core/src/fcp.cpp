#include <algorithm>
#include <cmath>
#include <limits>

#include "gpcp/conformal.hpp"
#include "gpcp/errors.hpp"

namespace gpcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void push_root(std::vector<double>& roots, double c0, double c1) {
  if (c1 != 0.0) {
    const double r = -c0 / c1;
    if (std::isfinite(r)) {
      roots.push_back(r);
    }
  }
}

}  // namespace

FullConformalSet::FullConformalSet(double center, std::vector<Comparison> comparisons)
    : center_(center), comparisons_(std::move(comparisons)) {
  for (const Comparison& c : comparisons_) {
    push_root(breakpoints_, c.d0, c.d1);
    push_root(breakpoints_, c.s0, c.s1);
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());

  const std::size_t b = breakpoints_.size();
  segment_gamma_.resize(b + 1);
  if (b == 0) {
    segment_gamma_[0] = gamma(center_);
    return;
  }
  const auto outward = [](double x) { return std::max(1.0, std::abs(x)); };
  segment_gamma_[0] = gamma(breakpoints_.front() - outward(breakpoints_.front()));
  for (std::size_t j = 1; j < b; ++j) {
    segment_gamma_[j] = gamma(0.5 * (breakpoints_[j - 1] + breakpoints_[j]));
  }
  segment_gamma_[b] = gamma(breakpoints_.back() + outward(breakpoints_.back()));
}

std::size_t FullConformalSet::gamma(double z) const {
  std::size_t count = 1;  // the candidate's own score
  for (const Comparison& c : comparisons_) {
    if ((c.d0 + c.d1 * z) * (c.s0 + c.s1 * z) <= 0.0) {
      ++count;
    }
  }
  return count;
}

std::size_t FullConformalSet::threshold(double alpha) const {
  check_level(alpha);
  return ranks::conformal(alpha, comparisons_.size());
}

bool FullConformalSet::accepts(double z, double alpha) const {
  const std::size_t k = threshold(alpha);
  if (std::binary_search(breakpoints_.begin(), breakpoints_.end(), z)) {
    return gamma(z) <= k;
  }
  const auto seg = static_cast<std::size_t>(
      std::distance(breakpoints_.begin(), std::upper_bound(breakpoints_.begin(), breakpoints_.end(), z)));
  return segment_gamma_[seg] <= k;
}

std::vector<std::pair<double, double>> FullConformalSet::sub_intervals(double alpha) const {
  const std::size_t k = threshold(alpha);
  std::vector<std::pair<double, double>> out;
  const std::size_t b = breakpoints_.size();
  for (std::size_t j = 0; j <= b; ++j) {
    if (segment_gamma_[j] > k) {
      continue;
    }
    const double lo = j == 0 ? -kInf : breakpoints_[j - 1];
    const double hi = j == b ? kInf : breakpoints_[j];
    if (!out.empty() && out.back().second == lo) {
      out.back().second = hi;
    } else {
      out.emplace_back(lo, hi);
    }
  }
  return out;
}

PredictionInterval FullConformalSet::at(double alpha) const {
  const auto parts = sub_intervals(alpha);
  if (parts.empty()) {
    return {center_, center_, alpha, true, true};
  }
  return {parts.front().first, parts.back().second, alpha, parts.size() == 1, false};
}

FullConformalSet fcp_gp_set(const FittedGP& model, const ScoreConfig& cfg, PointView x) {
  return fcp_gp_set(model, cfg, x, model.kriging(x));
}

FullConformalSet fcp_gp_set(const FittedGP& model, const ScoreConfig& cfg, PointView x,
                            const KrigingPrediction& at_x) {
  cfg.validate();
  const Design& pts = model.data().points();
  if (x.size() != pts.cols()) {
    throw DomainError("query point has the wrong dimension");
  }
  for (Index i = 0; i < pts.rows(); ++i) {
    if (pts.row(i) == x.transpose()) {
      throw DomainError("full-conformal query point coincides with a training site");
    }
  }

  // Augmenting the bordered kriging system with (x, z) is a rank-one
  // extension of its inverse. With S = sigma^2(x) + nugget and lambda the
  // kriging weights at x, the augmented LOO residuals are affine in z:
  //   r_i(z)     = (alpha_i + lambda_i (m(x) - z) / S) / (Q_ii + lambda_i^2 / S)
  //   r_{n+1}(z) = z - m(x)
  // and the augmented LOO variances do not depend on z.
  const double eps = cfg.epsilon_for(model);
  const double jitter = model.nugget() * model.spec().variance();
  const double s_aug = std::max(at_x.variance, 0.0) + jitter;
  const double m = at_x.mean;
  const auto scale = [&](double var) { return std::max(eps, std::pow(std::sqrt(std::max(var, 0.0)), cfg.beta)); };

  const double s_new = scale(at_x.variance);
  const double a_new = -m;
  const double b_new = 1.0;

  std::vector<FullConformalSet::Comparison> comparisons;
  comparisons.reserve(static_cast<std::size_t>(model.size()));
  for (Index i = 0; i < model.size(); ++i) {
    const double w = at_x.weights(i);
    const double denom = model.loo_precision()(i) + w * w / s_aug;
    const double a = (model.alpha_weights()(i) + w * m / s_aug) / denom;
    const double b = -(w / s_aug) / denom;
    const double s_i = scale(1.0 / denom - jitter);
    // |a + b z| / s_i <= |a_new + b_new z| / s_new, squared and factored.
    const double u0 = a * s_new;
    const double u1 = b * s_new;
    const double v0 = a_new * s_i;
    const double v1 = b_new * s_i;
    comparisons.push_back({u0 - v0, u1 - v1, u0 + v0, u1 + v1});
  }
  return FullConformalSet(m, std::move(comparisons));
}

}  // namespace gpcp
