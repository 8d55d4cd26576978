#include "gpcp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "gpcp/conformal.hpp"
#include "gpcp/errors.hpp"
#include "gpcp/gp.hpp"
#include "gpcp/metrics.hpp"
#include "gpcp/testbed.hpp"

namespace gpcp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GaussianFamily {
  double mean;
  double sd;

  [[nodiscard]] PredictionInterval at(double alpha) const {
    const double half = normal_quantile(0.5 * (1.0 + alpha)) * sd;
    return {mean - half, mean + half, alpha, true, false};
  }
};

/// Coverage counts over the IAE grid plus coverage and width at the
/// reporting level.
class LevelTally {
 public:
  LevelTally(const std::vector<double>& grid, double alpha) : grid_(grid), alpha_(alpha), hits_(grid.size(), 0) {}

  template <class Family>
  void add(const Family& family, double truth) {
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      hits_[k] += family.at(grid_[k]).contains(truth) ? 1 : 0;
    }
    const PredictionInterval iv = family.at(alpha_);
    alpha_hits_ += iv.contains(truth) ? 1 : 0;
    width_sum_ += iv.width();
    ++count_;
  }

  [[nodiscard]] double coverage() const { return static_cast<double>(alpha_hits_) / static_cast<double>(count_); }
  [[nodiscard]] double mean_width() const { return width_sum_ / static_cast<double>(count_); }
  [[nodiscard]] double iae_value() const {
    std::vector<double> cov(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      cov[k] = static_cast<double>(hits_[k]) / static_cast<double>(count_);
    }
    return iae(grid_, cov);
  }

 private:
  const std::vector<double>& grid_;
  double alpha_;
  std::vector<std::size_t> hits_;
  std::size_t alpha_hits_ = 0;
  double width_sum_ = 0.0;
  std::size_t count_ = 0;
};

KrigingPrediction column(const KrigingBatch& batch, Index j) {
  return {batch.mean(j), batch.variance(j), batch.weights.col(j)};
}

/// Runs `job(r)` for r in [0, count) on `threads` workers and rethrows the
/// first exception.
template <class Job>
void parallel_for(int count, int threads, Job job) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int r = 0; r < count; ++r) {
      job(r);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) {
        try {
          job(r);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

struct RepetitionOutput {
  std::vector<RunRecord> records;
  int failed_fits = 0;
};

RepetitionOutput run_repetition(const ExperimentConfig& config, const TestFunction& fn, int rep,
                                const std::vector<double>& grid) {
  const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(rep);
  const Design x_train = sample_uniform(fn.domain, config.resolved_n_train(), seed);
  const Design x_test = sample_uniform(fn.domain, config.n_test, test_seed(seed));
  const Dataset data(x_train, fn.evaluate(x_train));
  const Vector z_test = fn.evaluate(x_test);
  const std::span<const double> truths(z_test.data(), static_cast<std::size_t>(z_test.size()));
  const ScoreConfig scores{config.beta, std::nullopt};

  RepetitionOutput out;
  for (const int p : config.p_values) {
    const auto make_record = [&](Method m) {
      RunRecord rec;
      rec.function = fn.name;
      rec.method = std::string(to_string(m));
      rec.p = p;
      rec.repetition = rep;
      rec.seed = seed;
      return rec;
    };

    const auto t_fit = Clock::now();
    std::optional<FittedGP> model;
    try {
      model.emplace(reml_select(data, p, config.search), data, config.search.nugget);
    } catch (const ConditioningError&) {
      ++out.failed_fits;
      for (const Method m : config.methods) {
        RunRecord rec = make_record(m);
        rec.coverage = rec.mean_width = rec.iae = rec.rmse = kNaN;
        out.records.push_back(rec);
      }
      continue;
    }
    const double fit_time = seconds_since(t_fit);
    const KrigingBatch batch = model->kriging_batch(x_test);
    const double gp_rmse = rmse({batch.mean.data(), static_cast<std::size_t>(batch.mean.size())}, truths);

    for (const Method m : config.methods) {
      const auto t0 = Clock::now();
      LevelTally tally(grid, config.alpha);
      double method_rmse = gp_rmse;
      switch (m) {
        case Method::gaussian_reml:
          for (Index j = 0; j < x_test.rows(); ++j) {
            tally.add(GaussianFamily{batch.mean(j), std::sqrt(batch.variance(j))}, z_test(j));
          }
          break;
        case Method::fcp_gp:
          for (Index j = 0; j < x_test.rows(); ++j) {
            tally.add(fcp_gp_set(*model, scores, x_test.row(j).transpose(), column(batch, j)), z_test(j));
          }
          break;
        case Method::jplus_gp:
          for (Index j = 0; j < x_test.rows(); ++j) {
            tally.add(jplus_gp_bounds(*model, scores, column(batch, j)), z_test(j));
          }
          break;
        case Method::asym_jplus_gp:
          for (Index j = 0; j < x_test.rows(); ++j) {
            tally.add(asym_jplus_gp_bounds(*model, scores, column(batch, j)), z_test(j));
          }
          break;
        case Method::scp: {
          const Index half = data.size() / 2;
          const SplitConformal split(data.slice(0, half), data.slice(half, data.size() - half),
                                     gp_fit_function(model->spec(), config.search.nugget));
          std::vector<double> preds(static_cast<std::size_t>(x_test.rows()));
          for (Index j = 0; j < x_test.rows(); ++j) {
            const ResidualBand band = split.band(x_test.row(j).transpose());
            preds[static_cast<std::size_t>(j)] = band.center();
            tally.add(band, z_test(j));
          }
          method_rmse = rmse(preds, truths);
          break;
        }
        case Method::jcp:
        case Method::jplus: {
          const Jackknife jk(data, gp_fit_function(model->spec(), config.search.nugget));
          for (Index j = 0; j < x_test.rows(); ++j) {
            if (m == Method::jcp) {
              tally.add(jk.jcp_band(x_test.row(j).transpose()), z_test(j));
            } else {
              tally.add(jk.jplus_bounds(x_test.row(j).transpose()), z_test(j));
            }
          }
          break;
        }
      }
      RunRecord rec = make_record(m);
      rec.coverage = tally.coverage();
      rec.mean_width = tally.mean_width();
      rec.iae = tally.iae_value();
      rec.rmse = method_rmse;
      rec.wall_time_s = config.record_timing ? fit_time + seconds_since(t0) : 0.0;
      out.records.push_back(rec);
    }
  }
  return out;
}

std::size_t method_rank(std::string_view tag) {
  const auto& all = all_methods();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (to_string(all[i]) == tag) {
      return i;
    }
  }
  return all.size();
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<RunRecord>& records) {
  std::vector<SummaryRow> rows;
  for (const int p : config.p_values) {
    for (const Method m : config.methods) {
      SummaryRow row;
      row.function = config.function;
      row.p = p;
      row.method = std::string(to_string(m));
      for (const RunRecord& r : records) {
        if (r.p != p || r.method != row.method) {
          continue;
        }
        if (r.failed()) {
          ++row.failed;
          continue;
        }
        ++row.completed;
        row.mean_width += r.mean_width;
        row.mean_iae += r.iae;
        row.mean_coverage += r.coverage;
        row.mean_rmse += r.rmse;
      }
      const double c = row.completed > 0 ? static_cast<double>(row.completed) : kNaN;
      row.mean_width /= c;
      row.mean_iae /= c;
      row.mean_coverage /= c;
      row.mean_rmse /= c;
      rows.push_back(row);
    }
  }
  return rows;
}

double gaussian_iae(const Vector& means, const Vector& sds, const Vector& truths, const std::vector<double>& grid) {
  LevelTally tally(grid, 0.5);
  for (Index j = 0; j < truths.size(); ++j) {
    tally.add(GaussianFamily{means(j), sds(j)}, truths(j));
  }
  return tally.iae_value();
}

double rmse_of(const Vector& a, const Vector& b) {
  return rmse({a.data(), static_cast<std::size_t>(a.size())}, {b.data(), static_cast<std::size_t>(b.size())});
}

/// LOO and test metrics of the Gaussian intervals of one covariance.
ParetoRow gaussian_pareto_row(const CovarianceSpec& spec, const Dataset& data, const Design& x_test,
                              const Vector& z_test, double nugget, const std::vector<double>& grid) {
  const FittedGP model(spec, data, nugget);
  const Index n = data.size();
  Vector loo_mean(n);
  Vector loo_sd(n);
  for (Index i = 0; i < n; ++i) {
    loo_mean(i) = model.loo_at_training()[static_cast<std::size_t>(i)].mean;
    loo_sd(i) = model.loo_at_training()[static_cast<std::size_t>(i)].sd;
  }
  const KrigingBatch batch = model.kriging_batch(x_test);
  ParetoRow row;
  row.variance = spec.variance();
  row.lengthscales = spec.lengthscales();
  row.rmse_loo = rmse_of(loo_mean, data.values());
  row.iae_loo = gaussian_iae(loo_mean, loo_sd, data.values(), grid);
  row.rmse_test = rmse_of(batch.mean, z_test);
  row.iae_test = gaussian_iae(batch.mean, batch.variance.cwiseMax(0.0).cwiseSqrt(), z_test, grid);
  return row;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::gaussian_reml: return "gaussian_reml";
    case Method::fcp_gp: return "fcp_gp";
    case Method::jplus_gp: return "jplus_gp";
    case Method::asym_jplus_gp: return "asym_jplus_gp";
    case Method::scp: return "scp";
    case Method::jcp: return "jcp";
    case Method::jplus: return "jplus";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::gaussian_reml, Method::fcp_gp, Method::jplus_gp,
                                              Method::asym_jplus_gp, Method::scp,    Method::jcp,
                                              Method::jplus};
  return methods;
}

Method parse_method(std::string_view tag) {
  for (const Method m : all_methods()) {
    if (to_string(m) == tag) {
      return m;
    }
  }
  throw DomainError("unknown method '" + std::string(tag) + "'");
}

void ExperimentConfig::validate() const {
  (void)get_function(function);
  if (p_values.empty()) {
    throw DomainError("at least one regularity p is required");
  }
  for (const int p : p_values) {
    if (p < 1) {
      throw DomainError("regularity p must be >= 1");
    }
  }
  if (n_train && *n_train < 2) {
    throw DomainError("n_train must be >= 2");
  }
  if (n_test < 1 || repetitions < 1 || iae_grid_size < 2 || threads < 1) {
    throw DomainError("counts must be positive (iae grid >= 2)");
  }
  check_level(alpha);
  if (!(beta > 0.0)) {
    throw DomainError("beta must be positive");
  }
  if (methods.empty()) {
    throw DomainError("at least one method is required");
  }
}

int ExperimentConfig::resolved_n_train() const { return n_train.value_or(20 * get_function(function).dim); }

ExperimentConfig experiment_config_from_json(std::string_view json, ExperimentConfig base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw DomainError("config JSON must be an object");
  }
  try {
    if (doc.contains("function")) base.function = doc.at("function").get<std::string>();
    if (doc.contains("p_values")) base.p_values = doc.at("p_values").get<std::vector<int>>();
    if (doc.contains("n_train") && !doc.at("n_train").is_null()) base.n_train = doc.at("n_train").get<int>();
    if (doc.contains("n_test")) base.n_test = doc.at("n_test").get<int>();
    if (doc.contains("repetitions")) base.repetitions = doc.at("repetitions").get<int>();
    if (doc.contains("alpha")) base.alpha = doc.at("alpha").get<double>();
    if (doc.contains("beta")) base.beta = doc.at("beta").get<double>();
    if (doc.contains("base_seed")) base.base_seed = doc.at("base_seed").get<std::uint64_t>();
    if (doc.contains("iae_grid_size")) base.iae_grid_size = doc.at("iae_grid_size").get<int>();
    if (doc.contains("threads")) base.threads = doc.at("threads").get<int>();
    if (doc.contains("record_timing")) base.record_timing = doc.at("record_timing").get<bool>();
    if (doc.contains("n_starts")) base.search.n_starts = doc.at("n_starts").get<int>();
    if (doc.contains("methods")) {
      base.methods.clear();
      for (const auto& tag : doc.at("methods").get<std::vector<std::string>>()) {
        base.methods.push_back(parse_method(tag));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid config value: ") + e.what());
  }
  return base;
}

bool RunRecord::failed() const { return std::isnan(coverage); }

std::uint64_t test_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

BenchmarkResult run_benchmark(const ExperimentConfig& config) {
  config.validate();
  const TestFunction fn = get_function(config.function);
  const std::vector<double> grid = iae_grid(config.iae_grid_size);

  std::vector<RepetitionOutput> slots(static_cast<std::size_t>(config.repetitions));
  parallel_for(config.repetitions, config.threads,
               [&](int r) { slots[static_cast<std::size_t>(r)] = run_repetition(config, fn, r, grid); });

  BenchmarkResult result;
  int failed = 0;
  for (auto& slot : slots) {
    failed += slot.failed_fits;
    result.records.insert(result.records.end(), slot.records.begin(), slot.records.end());
  }
  const int fits = config.repetitions * static_cast<int>(config.p_values.size());
  if (5 * failed > fits) {
    throw HarnessError(std::to_string(failed) + " of " + std::to_string(fits) +
                       " REML fits failed (more than 20%)");
  }
  std::stable_sort(result.records.begin(), result.records.end(), [](const RunRecord& a, const RunRecord& b) {
    const auto ka = std::make_tuple(a.function, method_rank(a.method), a.p, a.repetition);
    const auto kb = std::make_tuple(b.function, method_rank(b.method), b.p, b.repetition);
    return ka < kb;
  });
  result.summary = summarize(config, result.records);
  return result;
}

std::string format_summary(const std::vector<SummaryRow>& summary) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %3s %-14s %14s %8s %9s %14s %6s\n", "function", "p", "method", "width",
                "iae", "coverage", "rmse", "failed");
  out += line;
  for (const SummaryRow& r : summary) {
    std::snprintf(line, sizeof line, "%-16s %3d %-14s %14.6g %8.4f %9.4f %14.6g %6d\n", r.function.c_str(), r.p,
                  r.method.c_str(), r.mean_width, r.mean_iae, r.mean_coverage, r.mean_rmse, r.failed);
    out += line;
  }
  return out;
}

void ParetoConfig::validate() const {
  (void)get_function(function);
  if (n_train < 3 || n_test < 1 || n_samples < 0 || p < 1 || iae_grid_size < 2) {
    throw DomainError("invalid Pareto configuration");
  }
  if (!(variance_decades >= 0.0) || !(lengthscale_decades >= 0.0) || !(beta > 0.0)) {
    throw DomainError("invalid Pareto sampling ranges");
  }
}

ParetoResult run_pareto(const ParetoConfig& config) {
  config.validate();
  const TestFunction fn = get_function(config.function);
  const std::vector<double> grid = iae_grid(config.iae_grid_size);
  const Design x_train = sample_uniform(fn.domain, config.n_train, config.seed);
  const Design x_test = sample_uniform(fn.domain, config.n_test, test_seed(config.seed));
  const Dataset data(x_train, fn.evaluate(x_train));
  const Vector z_test = fn.evaluate(x_test);
  const double nugget = config.search.nugget;

  const CovarianceSpec reml = reml_select(data, config.p, config.search);
  ParetoResult result;

  ParetoRow reml_row = gaussian_pareto_row(reml, data, x_test, z_test, nugget, grid);
  reml_row.kind = "reml";
  result.rows.push_back(reml_row);

  // J+GP on top of the REML model: the point predictor is unchanged, so the
  // RMSE columns are copied; IAE on the test set uses the J+GP bounds and
  // the LOO IAE uses J+GP fitted on each leave-one-out dataset.
  {
    const ScoreConfig scores{config.beta, std::nullopt};
    const FittedGP model(reml, data, nugget);
    const KrigingBatch batch = model.kriging_batch(x_test);
    LevelTally test_tally(grid, 0.5);
    for (Index j = 0; j < x_test.rows(); ++j) {
      test_tally.add(jplus_gp_bounds(model, scores, column(batch, j)), z_test(j));
    }
    LevelTally loo_tally(grid, 0.5);
    for (Index i = 0; i < data.size(); ++i) {
      const FittedGP reduced(reml, data.without(i), nugget);
      loo_tally.add(jplus_gp_bounds(reduced, scores, reduced.kriging(data.points().row(i).transpose())),
                    data.values()(i));
    }
    ParetoRow row = reml_row;
    row.kind = "jplus_gp";
    row.iae_loo = loo_tally.iae_value();
    row.iae_test = test_tally.iae_value();
    result.rows.push_back(row);
  }

  UniformStream rng(config.seed ^ 0xD1B54A32D192ED03ULL);
  const double ln10 = std::log(10.0);
  for (int s = 0; s < config.n_samples; ++s) {
    const double log_var =
        std::log(reml.variance()) + (2.0 * rng.next() - 1.0) * config.variance_decades * ln10;
    Vector rho(reml.dim());
    for (Index j = 0; j < reml.dim(); ++j) {
      rho(j) = reml.lengthscales()(j) * std::exp((2.0 * rng.next() - 1.0) * config.lengthscale_decades * ln10);
    }
    try {
      ParetoRow row = gaussian_pareto_row(CovarianceSpec(std::exp(log_var), rho, config.p), data, x_test, z_test,
                                          nugget, grid);
      row.kind = "sample";
      row.index = s;
      result.rows.push_back(std::move(row));
    } catch (const ConditioningError&) {
      ++result.failed_samples;
    }
  }
  return result;
}

}  // namespace gpcp
