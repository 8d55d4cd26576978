#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "gpcp/conformal.hpp"
#include "gpcp/errors.hpp"
#include "support/oracles.hpp"

namespace gpcp {
namespace {

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Ranks, HandComputedValues) {
  // n = 19: (n + 1) alpha = 18 at alpha = 0.9 exactly, despite rounding.
  EXPECT_EQ(ranks::conformal(0.9, 19), 18U);
  EXPECT_EQ(ranks::jplus_upper(0.9, 19), 18U);
  EXPECT_EQ(ranks::jplus_lower(0.9, 19), 2U);
  EXPECT_EQ(ranks::conformal(0.6, 4), 3U);
  EXPECT_EQ(ranks::jplus_lower(0.7, 9), 3U);
  EXPECT_EQ(ranks::asym_lower(0.9, 39), 2U);
  EXPECT_EQ(ranks::asym_upper(0.9, 39), 38U);
  EXPECT_EQ(ranks::asym_lower(0.5, 3), 1U);
  EXPECT_EQ(ranks::asym_upper(0.5, 3), 3U);
  EXPECT_EQ(ranks::clamp(0, 5), 1U);
  EXPECT_EQ(ranks::clamp(9, 5), 5U);
  EXPECT_EQ(ranks::clamp(3, 5), 3U);
}

TEST(Ranks, CheckLevel) {
  EXPECT_THROW(check_level(0.0), DomainError);
  EXPECT_THROW(check_level(1.0), DomainError);
  EXPECT_THROW(check_level(std::nan("")), DomainError);
  EXPECT_NO_THROW(check_level(0.5));
}

TEST(ResidualBand, ConformalQuantile) {
  const ResidualBand band(10.0, {0.5, 0.1, 0.4, 0.3, 0.2});
  // ceil(0.6 * 6) = 4th smallest = 0.4.
  const PredictionInterval iv = band.at(0.6);
  EXPECT_DOUBLE_EQ(iv.lower, 9.6);
  EXPECT_DOUBLE_EQ(iv.upper, 10.4);
  EXPECT_TRUE(iv.contiguous);
  EXPECT_FALSE(iv.empty);
  EXPECT_EQ(band.sorted_residuals(), (std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}));
  EXPECT_THROW(ResidualBand(0.0, {}), DomainError);
}

TEST(JackknifePlusBounds, OrderStatistics) {
  const std::vector<double> lo = {0.0, -1.0, 2.0, 1.0, -3.0, 0.5, 0.2, -0.7, 1.5};
  std::vector<double> hi(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    hi[i] = lo[i] + 2.0 + 0.1 * static_cast<double>(i);
  }
  const JackknifePlusBounds b(lo, hi);
  // n = 9, alpha = 0.7: lower rank floor(3) = 3, upper rank ceil(7) = 7.
  const PredictionInterval iv = b.at(0.7);
  EXPECT_DOUBLE_EQ(iv.lower, sorted(lo)[2]);
  EXPECT_DOUBLE_EQ(iv.upper, sorted(hi)[6]);
  EXPECT_EQ(b.size(), 9U);
  EXPECT_THROW(JackknifePlusBounds({1.0}, {1.0, 2.0}), DomainError);
}

TEST(JackknifePlusBounds, CrossedBoundsGiveEmptySet) {
  // Low level: the lower order statistic is high and the upper one low.
  const JackknifePlusBounds b({0.0, 5.0, 10.0}, {1.0, 6.0, 11.0});
  const PredictionInterval iv = b.at(0.2);
  EXPECT_TRUE(iv.empty);
  EXPECT_EQ(iv.width(), 0.0);
  EXPECT_FALSE(iv.contains(iv.lower));
}

TEST(SignedJackknifeBounds, OrderStatistics) {
  std::vector<double> xi(39);
  std::iota(xi.begin(), xi.end(), -19.0);
  std::reverse(xi.begin(), xi.end());
  const SignedJackknifeBounds b(xi);
  const PredictionInterval iv = b.at(0.9);
  EXPECT_DOUBLE_EQ(iv.lower, -18.0);  // rank 2
  EXPECT_DOUBLE_EQ(iv.upper, 18.0);   // rank 38
}

TEST(PredictionInterval, SetOperations) {
  const PredictionInterval a{0.0, 1.0, 0.5, true, false};
  const PredictionInterval b{-1.0, 2.0, 0.8, true, false};
  const PredictionInterval e{0.5, 0.5, 0.1, true, true};
  EXPECT_TRUE(a.subset_of(b));
  EXPECT_FALSE(b.subset_of(a));
  EXPECT_TRUE(e.subset_of(a));
  EXPECT_TRUE(a.contains(0.0));
  EXPECT_TRUE(a.contains(1.0));
  EXPECT_FALSE(a.contains(1.0000001));
  EXPECT_DOUBLE_EQ(b.width(), 3.0);
}

class GenericConformalTest : public ::testing::Test {
 protected:
  CovarianceSpec spec{1.0, oracle::constant(2, 0.4), 2};
  Dataset data = oracle::random_dataset(15, 2, 31);
  Vector x = (Vector(2) << 0.42, 0.17).finished();
};

TEST_F(GenericConformalTest, SplitConformalUsesCalibrationResiduals) {
  const Dataset train = data.slice(0, 7);
  const Dataset cal = data.slice(7, 8);
  const SplitConformal scp(train, cal, gp_fit_function(spec));
  std::vector<double> res;
  for (Index i = 0; i < cal.size(); ++i) {
    const auto k = oracle::dense_kriging(spec, train, cal.points().row(i).transpose());
    res.push_back(std::abs(cal.values()(i) - k.mean));
  }
  const double center = oracle::dense_kriging(spec, train, x).mean;
  const PredictionInterval iv = scp.interval(x, 0.75);  // rank ceil(0.75 * 9) = 7
  const double q = sorted(res)[6];
  EXPECT_NEAR(iv.lower, center - q, 1e-8);
  EXPECT_NEAR(iv.upper, center + q, 1e-8);
  EXPECT_THROW((void)scp.interval(x, 0.95), LevelError);  // rank 9 > 8
  EXPECT_NO_THROW((void)scp.band(x).at(0.95));
  const PredictionInterval direct = scp_interval(train, cal, gp_fit_function(spec), x, 0.75);
  EXPECT_DOUBLE_EQ(direct.lower, iv.lower);
}

TEST_F(GenericConformalTest, JackknifeMethodsMatchRefits) {
  const Jackknife jk(data, gp_fit_function(spec));
  std::vector<double> res, lo, hi;
  for (Index i = 0; i < data.size(); ++i) {
    const Dataset less = data.without(i);
    res.push_back(std::abs(data.values()(i) - oracle::brute_loo(spec, data, i).mean));
    const double s = oracle::dense_kriging(spec, less, x).mean;
    lo.push_back(s - res.back());
    hi.push_back(s + res.back());
    EXPECT_NEAR(jk.loo_residuals()[static_cast<std::size_t>(i)], res.back(), 1e-8);
  }
  const double center = oracle::dense_kriging(spec, data, x).mean;
  const PredictionInterval jcp = jk.jcp(x, 0.8);  // rank ceil(0.8 * 16) = 13
  EXPECT_NEAR(jcp.upper, center + sorted(res)[12], 1e-8);
  const PredictionInterval jp = jk.jplus(x, 0.8);  // ranks floor(3.2) = 3, 13
  EXPECT_NEAR(jp.lower, sorted(lo)[2], 1e-8);
  EXPECT_NEAR(jp.upper, sorted(hi)[12], 1e-8);
  EXPECT_THROW((void)jk.jplus(x, 15.5 / 16.0), LevelError);
  EXPECT_NO_THROW((void)jk.jplus(x, 15.0 / 16.0));
  EXPECT_THROW((void)jplus_interval(data, gp_fit_function(spec), x, 0.99), LevelError);
  EXPECT_NEAR(jcp_interval(data, gp_fit_function(spec), x, 0.8).upper, jcp.upper, 1e-12);
}

class GpConformalTest : public ::testing::TestWithParam<double> {
 protected:
  CovarianceSpec spec{1.5, oracle::constant(2, 0.35), 2};
  Dataset data = oracle::random_dataset(14, 2, 41);
};

TEST_P(GpConformalTest, ScoresMatchRefits) {
  const ScoreConfig cfg{GetParam(), std::nullopt};
  const FittedGP model(spec, data);
  const double eps = cfg.epsilon_for(model);
  const std::vector<double> got = gp_loo_scores(model, cfg, false);
  const std::vector<double> ref = oracle::brute_scores(spec, data, cfg.beta, eps);
  const std::vector<double> signed_scores = gp_loo_scores(model, cfg, true);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(got[i], ref[i], 1e-5 * std::max(1.0, ref[i]));
    EXPECT_DOUBLE_EQ(std::abs(signed_scores[i]), got[i]);
  }
}

TEST_P(GpConformalTest, JackknifePlusGpMatchesRefits) {
  const ScoreConfig cfg{GetParam(), std::nullopt};
  const FittedGP model(spec, data);
  const std::vector<double> scores = oracle::brute_scores(spec, data, cfg.beta, cfg.epsilon_for(model));
  const Vector x = (Vector(2) << 0.61, 0.28).finished();
  std::vector<double> lo, hi, xi;
  const std::vector<double> signed_scores = gp_loo_scores(model, cfg, true);
  for (Index i = 0; i < data.size(); ++i) {
    const auto k = oracle::dense_kriging(spec, data.without(i), x);
    const double sd = std::sqrt(std::max(k.variance, 0.0));
    const double half = scores[static_cast<std::size_t>(i)] * std::pow(sd, cfg.beta);
    lo.push_back(k.mean - half);
    hi.push_back(k.mean + half);
    xi.push_back(k.mean + signed_scores[static_cast<std::size_t>(i)] * sd);
  }
  const JackknifePlusBounds b = jplus_gp_bounds(model, cfg, model.kriging(x));
  for (std::size_t i = 0; i < lo.size(); ++i) {
    EXPECT_NEAR(b.sorted_lower()[i], sorted(lo)[i], 1e-5);
    EXPECT_NEAR(b.sorted_upper()[i], sorted(hi)[i], 1e-5);
  }
  const PredictionInterval iv = jplus_gp_interval(model, cfg, x, 0.8);
  EXPECT_NEAR(iv.lower, sorted(lo)[2], 1e-5);   // floor(0.2 * 15) = 3
  EXPECT_NEAR(iv.upper, sorted(hi)[11], 1e-5);  // ceil(0.8 * 15) = 12

  const SignedJackknifeBounds a = asym_jplus_gp_bounds(model, cfg, model.kriging(x));
  for (std::size_t i = 0; i < xi.size(); ++i) {
    EXPECT_NEAR(a.sorted()[i], sorted(xi)[i], 1e-5);
  }
}

INSTANTIATE_TEST_SUITE_P(Betas, GpConformalTest, ::testing::Values(1.0, 0.5, 1.5));

TEST(GpConformal, LevelAndConfigValidation) {
  const Dataset data = oracle::random_dataset(9, 2, 43);
  const FittedGP model(CovarianceSpec(1.0, oracle::constant(2, 0.4), 1), data);
  const Vector x = (Vector(2) << 0.5, 0.5).finished();
  EXPECT_THROW((void)jplus_gp_interval(model, {}, x, 0.95), LevelError);  // 0.95 > 9/10
  EXPECT_NO_THROW((void)jplus_gp_interval(model, {}, x, 0.9));
  EXPECT_THROW((void)jplus_gp_interval(model, {}, x, 0.0), DomainError);
  EXPECT_THROW((void)gp_loo_scores(model, ScoreConfig{0.0, std::nullopt}, false), DomainError);
  EXPECT_THROW((void)gp_loo_scores(model, ScoreConfig{1.0, -1.0}, false), DomainError);
  EXPECT_DOUBLE_EQ(ScoreConfig{}.epsilon_for(model), 1e-8);
}

// Properties: every method's intervals are nested in the level, and the
// full-conformal set always accepts the posterior mean (its own score is 0).
TEST(ConformalProperties, NestedInLevel) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset data = oracle::random_dataset(20, 2, 500 + seed);
    const FittedGP model(CovarianceSpec(1.0, oracle::constant(2, 0.3), 2), data);
    const Dataset queries = oracle::random_dataset(5, 2, 600 + seed);
    const ScoreConfig cfg;
    for (Index j = 0; j < queries.size(); ++j) {
      const Vector x = queries.points().row(j).transpose();
      const KrigingPrediction k = model.kriging(x);
      const JackknifePlusBounds jp = jplus_gp_bounds(model, cfg, k);
      const SignedJackknifeBounds asym = asym_jplus_gp_bounds(model, cfg, k);
      const FullConformalSet fcp = fcp_gp_set(model, cfg, x, k);
      PredictionInterval prev_jp{}, prev_asym{}, prev_fcp{};
      prev_jp.empty = prev_asym.empty = prev_fcp.empty = true;
      for (double a = 0.05; a < 0.96; a += 0.05) {
        const PredictionInterval ijp = jp.at(a), iasym = asym.at(a), ifcp = fcp.at(a);
        EXPECT_TRUE(prev_jp.subset_of(ijp)) << a;
        EXPECT_TRUE(prev_asym.subset_of(iasym)) << a;
        EXPECT_TRUE(prev_fcp.subset_of(ifcp)) << a;
        EXPECT_GE(ifcp.width(), 0.0);
        prev_jp = ijp;
        prev_asym = iasym;
        prev_fcp = ifcp;
      }
      EXPECT_TRUE(fcp.at(0.9).contains(k.mean));
    }
  }
}

TEST(ConformalProperties, ShiftEquivariant) {
  // Adding c to every observation moves every endpoint by exactly c: the
  // estimated constant mean absorbs it and the scores do not change.
  const double c = 3.7;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Dataset data = oracle::random_dataset(16, 2, 700 + seed);
    const Dataset moved = data.with_values(data.values().array() + c);
    const CovarianceSpec spec(0.9, oracle::constant(2, 0.35), 1 + static_cast<int>(seed));
    const FittedGP a(spec, data), b(spec, moved);
    const Vector x = oracle::random_dataset(1, 2, 800 + seed).points().row(0).transpose();
    const ScoreConfig cfg;
    const Jackknife ja(data, gp_fit_function(spec)), jb(moved, gp_fit_function(spec));
    const SplitConformal sa(data.slice(0, 8), data.slice(8, 8), gp_fit_function(spec));
    const SplitConformal sb(moved.slice(0, 8), moved.slice(8, 8), gp_fit_function(spec));
    for (double alpha : {0.3, 0.6, 0.85}) {
      const std::vector<std::pair<PredictionInterval, PredictionInterval>> pairs = {
          {gaussian_interval(a, x, alpha), gaussian_interval(b, x, alpha)},
          {jplus_gp_interval(a, cfg, x, alpha), jplus_gp_interval(b, cfg, x, alpha)},
          {asym_jplus_gp_interval(a, cfg, x, alpha), asym_jplus_gp_interval(b, cfg, x, alpha)},
          {fcp_gp_interval(a, cfg, x, alpha), fcp_gp_interval(b, cfg, x, alpha)},
          {ja.jcp(x, alpha), jb.jcp(x, alpha)},
          {ja.jplus(x, alpha), jb.jplus(x, alpha)},
          {sa.band(x).at(alpha), sb.band(x).at(alpha)},
      };
      for (const auto& [u, v] : pairs) {
        EXPECT_NEAR(v.lower, u.lower + c, 1e-8 * std::max(1.0, std::abs(u.lower)));
        EXPECT_NEAR(v.upper, u.upper + c, 1e-8 * std::max(1.0, std::abs(u.upper)));
      }
    }
  }
}

}  // namespace
}  // namespace gpcp
