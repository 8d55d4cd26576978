#include "gpcp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "gpcp/errors.hpp"

namespace gpcp {

namespace {

PredictionInterval make_interval(double lower, double upper, double alpha) {
  if (lower > upper) {
    const double mid = 0.5 * (lower + upper);
    return {mid, mid, alpha, true, true};
  }
  return {lower, upper, alpha, true, false};
}

void require_conformal_rank(double alpha, std::size_t m) {
  check_level(alpha);
  if (ranks::conformal(alpha, m) > m) {
    throw LevelError("level " + std::to_string(alpha) + " needs more than " + std::to_string(m) +
                     " calibration scores");
  }
}

void require_jplus_level(double alpha, std::size_t n) {
  check_level(alpha);
  // alpha <= n / (n + 1), i.e. ceil((n + 1) alpha) <= n.
  if (ranks::jplus_upper(alpha, n) > n) {
    throw LevelError("Jackknife+ level " + std::to_string(alpha) + " exceeds n/(n+1) for n = " + std::to_string(n));
  }
}

}  // namespace

ResidualBand::ResidualBand(double center, std::vector<double> residuals)
    : center_(center), sorted_(std::move(residuals)) {
  if (sorted_.empty()) {
    throw DomainError("residual band needs at least one residual");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

PredictionInterval ResidualBand::at(double alpha) const {
  const std::size_t rank = ranks::clamp(ranks::conformal(alpha, sorted_.size()), sorted_.size());
  const double q = sorted_[rank - 1];
  return make_interval(center_ - q, center_ + q, alpha);
}

JackknifePlusBounds::JackknifePlusBounds(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw DomainError("Jackknife+ needs two non-empty sequences of equal length");
  }
  std::sort(lower_.begin(), lower_.end());
  std::sort(upper_.begin(), upper_.end());
}

PredictionInterval JackknifePlusBounds::at(double alpha) const {
  const std::size_t n = lower_.size();
  const std::size_t lo = ranks::clamp(ranks::jplus_lower(alpha, n), n);
  const std::size_t hi = ranks::clamp(ranks::jplus_upper(alpha, n), n);
  return make_interval(lower_[lo - 1], upper_[hi - 1], alpha);
}

SignedJackknifeBounds::SignedJackknifeBounds(std::vector<double> xi) : xi_(std::move(xi)) {
  if (xi_.empty()) {
    throw DomainError("asymmetric Jackknife+ needs a non-empty sequence");
  }
  std::sort(xi_.begin(), xi_.end());
}

PredictionInterval SignedJackknifeBounds::at(double alpha) const {
  const std::size_t n = xi_.size();
  const std::size_t lo = ranks::clamp(ranks::asym_lower(alpha, n), n);
  const std::size_t hi = ranks::clamp(ranks::asym_upper(alpha, n), n);
  return make_interval(xi_[lo - 1], xi_[hi - 1], alpha);
}

// --- generic methods -------------------------------------------------------

FitFunction gp_fit_function(CovarianceSpec spec, double nugget) {
  return [spec = std::move(spec), nugget](const Dataset& data) -> PointPredictor {
    auto model = std::make_shared<const FittedGP>(spec, data, nugget);
    return [model](PointView x) { return model->posterior_mean(x); };
  };
}

SplitConformal::SplitConformal(const Dataset& train, const Dataset& cal, const FitFunction& fit)
    : predictor_(fit(train)) {
  residuals_.reserve(static_cast<std::size_t>(cal.size()));
  for (Index i = 0; i < cal.size(); ++i) {
    residuals_.push_back(std::abs(cal.values()(i) - predictor_(cal.points().row(i).transpose())));
  }
}

ResidualBand SplitConformal::band(PointView x) const { return ResidualBand(predictor_(x), residuals_); }

PredictionInterval SplitConformal::interval(PointView x, double alpha) const {
  require_conformal_rank(alpha, residuals_.size());
  return band(x).at(alpha);
}

Jackknife::Jackknife(const Dataset& data, const FitFunction& fit) : full_(fit(data)) {
  const Index n = data.size();
  if (n < 2) {
    throw DomainError("Jackknife needs at least two observations");
  }
  loo_.reserve(static_cast<std::size_t>(n));
  residuals_.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    loo_.push_back(fit(data.without(i)));
    residuals_.push_back(std::abs(data.values()(i) - loo_.back()(data.points().row(i).transpose())));
  }
}

ResidualBand Jackknife::jcp_band(PointView x) const { return ResidualBand(full_(x), residuals_); }

JackknifePlusBounds Jackknife::jplus_bounds(PointView x) const {
  std::vector<double> lower(loo_.size());
  std::vector<double> upper(loo_.size());
  for (std::size_t i = 0; i < loo_.size(); ++i) {
    const double s = loo_[i](x);
    lower[i] = s - residuals_[i];
    upper[i] = s + residuals_[i];
  }
  return {std::move(lower), std::move(upper)};
}

PredictionInterval Jackknife::jcp(PointView x, double alpha) const {
  require_conformal_rank(alpha, residuals_.size());
  return jcp_band(x).at(alpha);
}

PredictionInterval Jackknife::jplus(PointView x, double alpha) const {
  require_jplus_level(alpha, loo_.size());
  return jplus_bounds(x).at(alpha);
}

PredictionInterval scp_interval(const Dataset& train, const Dataset& cal, const FitFunction& fit, PointView x,
                                double alpha) {
  require_conformal_rank(alpha, static_cast<std::size_t>(cal.size()));
  return SplitConformal(train, cal, fit).interval(x, alpha);
}

PredictionInterval jcp_interval(const Dataset& data, const FitFunction& fit, PointView x, double alpha) {
  require_conformal_rank(alpha, static_cast<std::size_t>(data.size()));
  return Jackknife(data, fit).jcp(x, alpha);
}

PredictionInterval jplus_interval(const Dataset& data, const FitFunction& fit, PointView x, double alpha) {
  require_jplus_level(alpha, static_cast<std::size_t>(data.size()));
  return Jackknife(data, fit).jplus(x, alpha);
}

// --- GP-specific methods ---------------------------------------------------

void ScoreConfig::validate() const {
  if (!(beta > 0.0)) {
    throw DomainError("score exponent beta must be positive");
  }
  if (epsilon && !(*epsilon >= 0.0)) {
    throw DomainError("score stabilizer epsilon must be non-negative");
  }
}

double ScoreConfig::epsilon_for(const FittedGP& model) const {
  return epsilon.value_or(1e-8 * std::sqrt(model.spec().variance()));
}

std::vector<double> gp_loo_scores(const FittedGP& model, const ScoreConfig& cfg, bool signed_scores) {
  cfg.validate();
  const double eps = cfg.epsilon_for(model);
  const auto& loo = model.loo_at_training();
  std::vector<double> scores(loo.size());
  for (std::size_t i = 0; i < loo.size(); ++i) {
    const double r = model.loo_residuals()(static_cast<Index>(i)) / std::max(eps, std::pow(loo[i].sd, cfg.beta));
    scores[i] = signed_scores ? r : std::abs(r);
  }
  return scores;
}

JackknifePlusBounds jplus_gp_bounds(const FittedGP& model, const ScoreConfig& cfg, const KrigingPrediction& at_x) {
  const std::vector<double> scores = gp_loo_scores(model, cfg, false);
  const double eps = cfg.epsilon_for(model);
  std::vector<double> lower(scores.size());
  std::vector<double> upper(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const LooPrediction p = model.loo_predict(static_cast<Index>(i), at_x);
    const double half = scores[i] * std::max(eps, std::pow(p.sd, cfg.beta));
    lower[i] = p.mean - half;
    upper[i] = p.mean + half;
  }
  return {std::move(lower), std::move(upper)};
}

SignedJackknifeBounds asym_jplus_gp_bounds(const FittedGP& model, const ScoreConfig& cfg,
                                           const KrigingPrediction& at_x) {
  const std::vector<double> scores = gp_loo_scores(model, cfg, true);
  const double eps = cfg.epsilon_for(model);
  std::vector<double> xi(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const LooPrediction p = model.loo_predict(static_cast<Index>(i), at_x);
    xi[i] = p.mean + scores[i] * std::max(eps, p.sd);
  }
  return SignedJackknifeBounds(std::move(xi));
}

PredictionInterval jplus_gp_interval(const FittedGP& model, const ScoreConfig& cfg, PointView x, double alpha) {
  require_jplus_level(alpha, static_cast<std::size_t>(model.size()));
  return jplus_gp_bounds(model, cfg, model.kriging(x)).at(alpha);
}

PredictionInterval asym_jplus_gp_interval(const FittedGP& model, const ScoreConfig& cfg, PointView x,
                                          double alpha) {
  check_level(alpha);
  return asym_jplus_gp_bounds(model, cfg, model.kriging(x)).at(alpha);
}

PredictionInterval fcp_gp_interval(const FittedGP& model, const ScoreConfig& cfg, PointView x, double alpha) {
  check_level(alpha);
  return fcp_gp_set(model, cfg, x).at(alpha);
}

}  // namespace gpcp
