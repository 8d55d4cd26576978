#include "gpcp/reml.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gpcp/cholesky.hpp"
#include "gpcp/errors.hpp"
#include "nelder_mead.hpp"

namespace gpcp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr std::array<int, 12> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::size_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::size_t>(base));
    index /= static_cast<std::size_t>(base);
    f /= base;
  }
  return result;
}

struct SearchBox {
  Vector lower;
  Vector upper;
};

SearchBox start_box(const Dataset& data) {
  const Index n = data.size();
  const Index d = data.dim();
  SearchBox box{Vector(d), Vector(d)};
  const double spread = 10.0 * std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d));
  for (Index j = 0; j < d; ++j) {
    double range = data.points().col(j).maxCoeff() - data.points().col(j).minCoeff();
    if (!(range > 0.0)) {
      range = 1.0;
    }
    box.lower(j) = std::log(range / spread);
    box.upper(j) = std::log(10.0 * range);
  }
  return box;
}

// Largest absolute value, so that rescaling by a power of two is exact.
double value_scale(const Vector& z) {
  const double s = z.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

}  // namespace

double restricted_log_likelihood(const Dataset& data, const CovarianceSpec& spec, double nugget) {
  const Index n = data.size();
  const Matrix l = cholesky_lower(gram_matrix(spec, data.points(), nugget));
  const auto lower = l.triangularView<Eigen::Lower>();
  const Vector w1 = lower.solve(Vector::Ones(n));
  const Vector wz = lower.solve(data.values());
  const double s = w1.squaredNorm();
  const double m = w1.dot(wz) / s;
  const double quad = (wz - m * w1).squaredNorm();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(n - 1) * kLog2Pi + log_det + std::log(s) + quad);
}

ProfiledReml profiled_reml(const Dataset& data, const Vector& log_lengthscales, int p, double nugget) {
  const Index n = data.size();
  const CovarianceSpec unit(1.0, log_lengthscales.array().exp().matrix(), p);
  Matrix l;
  ProfiledReml out;
  if (const Index pivot = try_cholesky_lower(gram_matrix(unit, data.points(), nugget), l); pivot >= 0) {
    out.failed_pivot = pivot;
    return out;
  }
  const auto lower = l.triangularView<Eigen::Lower>();
  const Vector w1 = lower.solve(Vector::Ones(n));
  const Vector wz = lower.solve(data.values());
  const double s = w1.squaredNorm();
  const double m = w1.dot(wz) / s;
  const double quad = (wz - m * w1).squaredNorm();
  const double dof = static_cast<double>(n - 1);
  out.variance = quad / dof;
  if (!(out.variance > 0.0) || !std::isfinite(out.variance)) {
    return out;
  }
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  out.log_likelihood = -0.5 * (dof * (kLog2Pi + std::log(out.variance) + 1.0) + log_det + std::log(s));
  out.ok = std::isfinite(out.log_likelihood);
  return out;
}

std::vector<Vector> reml_start_points(const Dataset& data, const SearchConfig& search) {
  const SearchBox box = start_box(data);
  const Index d = data.dim();
  std::vector<Vector> starts;
  starts.reserve(static_cast<std::size_t>(std::max(search.n_starts, 1)));
  starts.push_back(0.5 * (box.lower + box.upper));
  for (int k = 1; k < search.n_starts; ++k) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) {
      const int base = kPrimes[static_cast<std::size_t>(j) % kPrimes.size()];
      x(j) = box.lower(j) + radical_inverse(static_cast<std::size_t>(k), base) * (box.upper(j) - box.lower(j));
    }
    starts.push_back(std::move(x));
  }
  return starts;
}

RemlResult reml_fit(const Dataset& data, int p, const SearchConfig& search) {
  const Index n = data.size();
  const Index d = data.dim();
  if (n <= d + 1) {
    throw DomainError("REML needs more than d + 1 observations");
  }

  // Work on values divided by their largest magnitude; the profiled
  // objective then only differs by a constant and the selected lengthscales
  // are scale-free.
  const double scale = value_scale(data.values());
  const Dataset scaled = data.with_values(data.values() / scale);

  const SearchBox box = start_box(data);
  const Vector bound_lo = box.lower.array() - std::log(10.0);
  const Vector bound_hi = box.upper.array() + std::log(10.0);
  const double step = 0.1 * (box.upper - box.lower).maxCoeff();

  Index last_pivot = -1;
  const auto objective = [&](const Vector& theta) {
    if ((theta.array() < bound_lo.array()).any() || (theta.array() > bound_hi.array()).any()) {
      return std::numeric_limits<double>::infinity();
    }
    const ProfiledReml r = profiled_reml(scaled, theta, p, search.nugget);
    if (!r.ok) {
      last_pivot = std::max(last_pivot, r.failed_pivot);
      return std::numeric_limits<double>::infinity();
    }
    return -r.log_likelihood;
  };

  std::vector<RemlStart> starts;
  Vector best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  for (const Vector& start : reml_start_points(data, search)) {
    const double f0 = objective(start);
    starts.push_back({start, -f0});
    const detail::NelderMeadResult r =
        detail::nelder_mead(objective, start, step, search.max_evals, search.f_tolerance, search.x_tolerance);
    evaluations += r.evaluations + 1;
    if (r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw ConditioningError("REML failed for every start point", last_pivot);
  }

  const ProfiledReml best = profiled_reml(scaled, best_theta, p, search.nugget);
  // Report likelihoods on the original value scale: each differs from the
  // scaled one by -(n - 1) log(scale).
  const double shift = -static_cast<double>(n - 1) * std::log(scale);
  for (auto& s : starts) {
    s.log_likelihood += shift;
  }
  return {CovarianceSpec(best.variance * scale * scale, best_theta.array().exp().matrix(), p),
          best.log_likelihood + shift, std::move(starts), evaluations};
}

CovarianceSpec reml_select(const Dataset& data, int p, const SearchConfig& search) {
  return reml_fit(data, p, search).spec;
}

}  // namespace gpcp
