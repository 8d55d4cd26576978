// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails. Criteria may be selected by number on the command line,
// e.g. `gpcp_acceptance 1 2 9`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "gpcp/cholesky.hpp"
#include "gpcp/conformal.hpp"
#include "gpcp/gp.hpp"
#include "gpcp/harness.hpp"
#include "gpcp/metrics.hpp"
#include "gpcp/testbed.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gpcp;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Random spec with per-dimension lengthscales in [0.2, 0.8].
CovarianceSpec random_spec(std::mt19937_64& rng, Index d, int p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector rho(d);
  for (Index j = 0; j < d; ++j) rho(j) = 0.2 + 0.6 * u(rng);
  return CovarianceSpec(0.5 + 2.0 * u(rng), rho, p);
}

/// Joint draw of a centred GP plus a constant at the rows of `x`, with the
/// same diagonal jitter the fitted models use.
Vector gp_draw(const CovarianceSpec& spec, const Design& x, std::mt19937_64& rng, double offset) {
  const Eigen::LLT<Matrix> llt(gram_matrix(spec, x, kDefaultNugget));
  std::normal_distribution<double> g(0.0, 1.0);
  Vector e(x.rows());
  for (Index i = 0; i < x.rows(); ++i) e(i) = g(rng);
  return (llt.matrixL() * e).array() + offset;
}

Design uniform_design(Index n, Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Design x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = u(rng);
  return x;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Virtual LOO against drop-refit-predict.
Outcome loo_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Index n = 4 + k % 9;       // 4..12
    const Index d = 1 + k % 3;       // 1..3
    const int p = 1 + (k * 7) % 10;  // 1..10
    const CovarianceSpec spec = random_spec(rng, d, p);
    const Design x = uniform_design(n, d, rng);
    const Dataset data(x, gp_draw(spec, x, rng, 5.0));
    const FittedGP model(spec, data);
    for (Index i = 0; i < n; ++i) {
      const FittedGP refit(spec, data.without(i));
      const KrigingPrediction brute = refit.kriging(x.row(i).transpose());
      const LooPrediction fast = model.loo_at_training()[static_cast<std::size_t>(i)];
      worst = std::max(worst, std::abs(fast.mean - brute.mean) / std::abs(brute.mean));
      worst = std::max(worst, std::abs(fast.sd - brute.sd()) / brute.sd());
    }
  }
  const double secs = since(t0);
  return {worst <= 1e-6 && secs < 10.0, fmt("30 datasets, max relative error %.2e, %.2f s", worst, secs)};
}

// 2. Full-conformal closed form against a grid scan of augmented refits.
Outcome fcp_grid_scan() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  long mismatches = 0, points = 0;
  for (int k = 0; k < 20; ++k) {
    const Index n = 3 + k % 8;  // 3..10
    const Index d = 1 + k % 2;
    const CovarianceSpec spec = random_spec(rng, d, 1 + k % 5);
    const Design x = uniform_design(n + 1, d, rng);
    const Dataset all(x, gp_draw(spec, x, rng, 0.0));
    const Dataset data = all.slice(0, n);
    const Vector xq = x.row(n).transpose();
    const double alpha = 0.5 + 0.02 * k;
    const FittedGP model(spec, data);
    const ScoreConfig cfg;
    const double eps = cfg.epsilon_for(model);
    const FullConformalSet set = fcp_gp_set(model, cfg, xq);
    const KrigingPrediction kp = model.kriging(xq);
    const std::size_t threshold = ranks::conformal(alpha, static_cast<std::size_t>(n));
    for (int g = 0; g < 2000; ++g) {
      const double z = kp.mean + kp.sd() * (-6.0 + 12.0 * g / 1999.0);
      const bool ref = oracle::brute_gamma(spec, data, xq, z, cfg.beta, eps) <= threshold;
      mismatches += ref != set.accepts(z, alpha) ? 1 : 0;
      ++points;
    }
  }
  const double secs = since(t0);
  return {mismatches == 0 && secs < 30.0,
          fmt("20 cases, %ld grid points, %ld disagreements, %.2f s", points, mismatches, secs)};
}

// 3. Monte-Carlo coverage of J+GP and asymmetric J+GP on exchangeable data.
Outcome coverage_bounds() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  const Index pool_size = 1500, n = 40, d = 2;
  const CovarianceSpec spec(1.0, oracle::constant(d, 0.3), 2);
  const Design pool = uniform_design(pool_size, d, rng);
  const Vector values = gp_draw(spec, pool, rng, 0.0);
  const int trials = 3000;
  const double alpha = 0.9;
  int hit_jp = 0, hit_asym = 0;
  std::vector<Index> idx(static_cast<std::size_t>(pool_size));
  for (Index i = 0; i < pool_size; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int t = 0; t < trials; ++t) {
    // Partial Fisher-Yates: n training points and one test point.
    for (Index i = 0; i <= n; ++i) {
      std::uniform_int_distribution<Index> pick(i, pool_size - 1);
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    Design x(n, d);
    Vector z(n);
    for (Index i = 0; i < n; ++i) {
      x.row(i) = pool.row(idx[static_cast<std::size_t>(i)]);
      z(i) = values(idx[static_cast<std::size_t>(i)]);
    }
    const Vector xq = pool.row(idx[static_cast<std::size_t>(n)]).transpose();
    const double zq = values(idx[static_cast<std::size_t>(n)]);
    const FittedGP model(spec, Dataset(x, z));
    const KrigingPrediction kp = model.kriging(xq);
    hit_jp += jplus_gp_bounds(model, {}, kp).at(alpha).contains(zq) ? 1 : 0;
    hit_asym += asym_jplus_gp_bounds(model, {}, kp).at(alpha).contains(zq) ? 1 : 0;
  }
  const double cj = static_cast<double>(hit_jp) / trials;
  const double ca = static_cast<double>(hit_asym) / trials;
  const double secs = since(t0);
  const auto ok = [](double c) { return c >= 0.8 && c >= 0.85 && c <= 0.97; };
  return {ok(cj) && ok(ca) && secs < 300.0,
          fmt("%d trials, coverage J+GP %.4f, asymJ+GP %.4f, %.1f s", trials, cj, ca, secs)};
}

// 4. Signed LOO scores on prior draws are standard normal.
Outcome score_normality() {
  std::mt19937_64 rng(4);
  std::vector<double> scores;
  const ScoreConfig cfg;
  for (int k = 0; k < 100; ++k) {
    const Index d = 1 + k % 3;
    const CovarianceSpec spec = random_spec(rng, d, 1 + k % 4);
    const Design x = uniform_design(30, d, rng);
    const FittedGP model(spec, Dataset(x, gp_draw(spec, x, rng, 2.0)));
    const auto s = gp_loo_scores(model, cfg, true);
    scores.insert(scores.end(), s.begin(), s.end());
  }
  std::sort(scores.begin(), scores.end());
  const double m = static_cast<double>(scores.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double f = 0.5 * std::erfc(-scores[i] / std::sqrt(2.0));
    ks = std::max({ks, f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f});
  }
  return {ks < 0.05 && scores.size() >= 2000, fmt("%zu scores, KS statistic %.4f", scores.size(), ks)};
}

struct GoldsteinRun {
  BenchmarkResult result;
  double secs;
};

const GoldsteinRun& goldstein_run() {
  static const GoldsteinRun run = [] {
    const auto t0 = Clock::now();
    ExperimentConfig cfg;
    cfg.function = "goldstein_price";
    cfg.p_values = {1, 9};
    cfg.n_train = 40;
    cfg.n_test = 1100;
    cfg.repetitions = 40;
    cfg.alpha = 0.9;
    BenchmarkResult res = run_benchmark(cfg);
    return GoldsteinRun{std::move(res), since(t0)};
  }();
  return run;
}

std::vector<const RunRecord*> select(const BenchmarkResult& res, const std::string& method, int p) {
  std::vector<const RunRecord*> out;
  for (const auto& r : res.records)
    if (r.method == method && r.p == p) out.push_back(&r);
  return out;
}

double mean_of(const std::vector<const RunRecord*>& rs, double RunRecord::*field) {
  double s = 0.0;
  for (const auto* r : rs) s += r->*field;
  return s / static_cast<double>(rs.size());
}

// 5. Goldstein-Price calibration improvement at p = 1.
Outcome goldstein_iae() {
  const GoldsteinRun& run = goldstein_run();
  const auto reml = select(run.result, "gaussian_reml", 1);
  const auto jp = select(run.result, "jplus_gp", 1);
  int wins = 0;
  for (std::size_t r = 0; r < reml.size(); ++r) wins += jp[r]->iae < reml[r]->iae ? 1 : 0;
  const double a = mean_of(reml, &RunRecord::iae);
  const double b = mean_of(jp, &RunRecord::iae);
  const bool ok = reml.size() == 40 && a >= 0.10 && a <= 0.30 && b >= 0.03 && b <= 0.12 && wins >= 35;
  return {ok, fmt("mean IAE gaussian_reml %.4f, jplus_gp %.4f, J+GP better in %d/40 (benchmark %.1f s for p=1,9)", a,
                  b, wins, run.secs)};
}

// 6. REML over-confidence at p = 9.
Outcome coverage_ordering() {
  const GoldsteinRun& run = goldstein_run();
  const double a = mean_of(select(run.result, "gaussian_reml", 9), &RunRecord::coverage);
  const double b = mean_of(select(run.result, "jplus_gp", 9), &RunRecord::coverage);
  return {a < b, fmt("p=9 mean coverage at 0.9: gaussian_reml %.4f, jplus_gp %.4f", a, b)};
}

// 7. The four GP methods share the point predictor.
Outcome rmse_invariance() {
  const GoldsteinRun& run = goldstein_run();
  double worst = 0.0;
  int groups = 0;
  for (int p : {1, 9}) {
    const auto base = select(run.result, "gaussian_reml", p);
    for (const char* m : {"fcp_gp", "jplus_gp", "asym_jplus_gp"}) {
      const auto other = select(run.result, m, p);
      for (std::size_t r = 0; r < base.size(); ++r) {
        worst = std::max(worst, std::abs(other[r]->rmse - base[r]->rmse) / base[r]->rmse);
        ++groups;
      }
    }
  }
  return {worst <= 1e-12 && groups == 240, fmt("%d comparisons, max relative difference %.1e", groups, worst)};
}

// 8. Pareto scatter around the REML estimate.
Outcome pareto() {
  const auto t0 = Clock::now();
  int good = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ParetoConfig cfg;
    cfg.seed = seed;
    const ParetoResult res = run_pareto(cfg);
    const double reml = res.rows[0].iae_test;
    const double jp = res.rows[1].iae_test;
    double best_sample = 1.0;
    for (std::size_t i = 2; i < res.rows.size(); ++i) best_sample = std::min(best_sample, res.rows[i].iae_test);
    const bool ok = jp < reml && best_sample >= 0.01;
    good += ok ? 1 : 0;
    per_seed += fmt(" [%.3f/%.3f/%.3f]", reml, jp, best_sample);
  }
  const double secs = since(t0);
  return {good >= 9 && secs < 600.0,
          fmt("%d/10 replications (reml/jplus_gp/best sample IAE:%s), %.1f s", good, per_seed.c_str(), secs)};
}

// 9. Byte-identical CSV across runs and thread counts.
Outcome determinism() {
  ExperimentConfig cfg;
  cfg.function = "hartmann4";
  cfg.p_values = {1, 3};
  cfg.n_train = 30;
  cfg.n_test = 200;
  cfg.repetitions = 6;
  cfg.base_seed = 2024;
  cfg.methods = all_methods();
  const std::string a = format_results(run_benchmark(cfg).records, OutputFormat::csv);
  const std::string b = format_results(run_benchmark(cfg).records, OutputFormat::csv);
  cfg.threads = 4;
  const std::string c = format_results(run_benchmark(cfg).records, OutputFormat::csv);
  return {a == b && a == c, fmt("%zu bytes; repeat %s, 4 threads %s", a.size(), a == b ? "identical" : "DIFFERENT",
                                a == c ? "identical" : "DIFFERENT")};
}

// 10. Intervals nest as the level increases, for every method.
Outcome monotonicity() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long checks = 0, violations = 0;
  for (int k = 0; k < 25; ++k) {
    const Index d = 1 + k % 3;
    const Index n = 10 + k % 11;
    const CovarianceSpec spec = random_spec(rng, d, 1 + k % 6);
    const Design x = uniform_design(n + 3, d, rng);
    const Dataset all(x, gp_draw(spec, x, rng, 1.0));
    const Dataset data = all.slice(0, n);
    const FittedGP model(spec, data);
    const ScoreConfig cfg{0.5 + u(rng), std::nullopt};
    const Jackknife jk(data, gp_fit_function(spec));
    const SplitConformal split(data.slice(0, n / 2), data.slice(n / 2, n - n / 2), gp_fit_function(spec));
    std::vector<double> levels(40);
    for (auto& a : levels) a = 0.001 + 0.998 * u(rng);
    std::sort(levels.begin(), levels.end());
    for (Index q = n; q < n + 3; ++q) {
      const Vector xq = x.row(q).transpose();
      const KrigingPrediction kp = model.kriging(xq);
      const auto jpb = jplus_gp_bounds(model, cfg, kp);
      const auto asb = asym_jplus_gp_bounds(model, cfg, kp);
      const auto fcp = fcp_gp_set(model, cfg, xq, kp);
      const auto jcb = jk.jcp_band(xq);
      const auto jkp = jk.jplus_bounds(xq);
      const auto scb = split.band(xq);
      const std::vector<std::function<PredictionInterval(double)>> methods = {
          [&](double a) { return gaussian_interval(model, xq, a); },
          [&](double a) { return fcp.at(a); },
          [&](double a) { return jpb.at(a); },
          [&](double a) { return asb.at(a); },
          [&](double a) { return scb.at(a); },
          [&](double a) { return jcb.at(a); },
          [&](double a) { return jkp.at(a); },
      };
      for (const auto& method : methods) {
        for (std::size_t i = 1; i < levels.size(); ++i) {
          violations += method(levels[i - 1]).subset_of(method(levels[i])) ? 0 : 1;
          ++checks;
        }
      }
    }
  }
  return {violations == 0, fmt("%ld nested-pair checks over 7 methods, %ld violations", checks, violations)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"virtual LOO equals drop-refit-predict", loo_equivalence},
      {"full-conformal closed form equals grid scan", fcp_grid_scan},
      {"finite-sample coverage of J+GP and asymJ+GP", coverage_bounds},
      {"signed LOO scores are N(0,1)", score_normality},
      {"Goldstein-Price IAE improvement at p=1", goldstein_iae},
      {"REML coverage below J+GP at p=9", coverage_ordering},
      {"identical RMSE across GP methods", rmse_invariance},
      {"Pareto scatter on Goldstein-Price", pareto},
      {"byte-identical CSV across runs and threads", determinism},
      {"intervals nest as alpha increases", monotonicity},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
