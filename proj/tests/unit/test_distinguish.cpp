#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mollify/distinguish.hpp"
#include "mollify/metrics.hpp"
#include "mollify/rng.hpp"

using namespace mollify;

namespace {

// Daily grid with room for a 0.5 bandwidth kernel.
GridSpec daily_grid() { return GridSpec::make(1.0, 4.0 / 252.0, 4.0, 1.0 / 252.0); }

ParamPath constant_path(const GridSpec& g, double a, double sigma) {
  const std::size_t n = g.model_count();
  return {g, PathDomain::Model, std::vector<double>(n, a), std::vector<double>(n, sigma), {}};
}

PricePath flat_path(const GridSpec& g, double S) {
  PricePath p{g, std::vector<double>(g.model_count(), std::log(S)), S};
  return p;
}

double brute_force_ks(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> pooled = xs;
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  double d = 0.0;
  for (double t : pooled) {
    const double fx = static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double x) { return x <= t; })) /
                      static_cast<double>(xs.size());
    const double fy = static_cast<double>(std::count_if(ys.begin(), ys.end(), [&](double y) { return y <= t; })) /
                      static_cast<double>(ys.size());
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

// Exact permutation p-value: share of all splits of the pooled sample into
// groups of the original sizes whose statistic reaches the observed one.
double permutation_p(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double observed = brute_force_ks(xs, ys);
  std::vector<double> pooled = xs;
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const std::size_t n = pooled.size();
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(xs.size()), true);
  std::size_t total = 0, extreme = 0;
  do {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? a : b).push_back(pooled[i]);
    ++total;
    if (brute_force_ks(a, b) >= observed - 1e-12) ++extreme;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double band_half_width(double alpha, std::size_t trials) {
  return 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(trials));
}

}  // namespace

TEST(Rounding, HalfToEven) {
  EXPECT_DOUBLE_EQ(round_to_tick(100.004, 0.01), 100.00);
  EXPECT_DOUBLE_EQ(round_to_tick(100.006, 0.01), 100.01);
  EXPECT_EQ(round_to_tick(0.125, 0.25), 0.0);
  EXPECT_EQ(round_to_tick(0.375, 0.25), 0.5);
  EXPECT_EQ(round_to_tick(0.625, 0.25), 0.5);
  EXPECT_THROW(round_to_tick(1.0, 0.0), std::invalid_argument);
}

TEST(Observe, FlatPathRoundsDown) {
  const GridSpec g = daily_grid();
  const ObservationSeries s = observe(flat_path(g, 100.004), 1.0 / 252.0, 0.01);
  ASSERT_EQ(s.values.size(), 253u);
  for (double v : s.values) EXPECT_DOUBLE_EQ(v, 100.00);
  EXPECT_NEAR(s.times.front(), -1.0, 1e-12);
  EXPECT_NEAR(s.times.back(), 0.0, 1e-12);
}

TEST(Observe, FineTickReproducesThePath) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.005);
  const PricePath p = integrate(constant_path(g, 0.05, 0.2), brownian(g, 1), 100.0, 0.05);
  const ObservationSeries s = observe(p, g.h(), 1e-9);
  ASSERT_EQ(s.values.size(), g.lookback_steps() + 1);
  for (std::size_t k = 0; k < s.values.size(); ++k) EXPECT_NEAR(s.values[k], p.S(k), 1e-9);
}

TEST(Observe, RoundingBoundAndIdempotence) {
  const GridSpec g = daily_grid();
  const PricePath p = integrate(constant_path(g, 0.05, 0.3), brownian(g, 2), 100.0, 0.05);
  const ObservationSeries s = observe(p, 1.0 / 252.0, 0.01);
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    EXPECT_LE(std::abs(s.values[k] - p.S(k)), 0.005 + 1e-12);
    const double units = s.values[k] / 0.01;
    EXPECT_NEAR(units, std::round(units), 1e-6);
  }
  const ObservationSeries again = observe(s, s.dt, s.tick);
  EXPECT_EQ(again.values, s.values);
  const ObservationSeries weekly = observe(p, 4.0 / 252.0, 0.01);
  EXPECT_EQ(observe(weekly, weekly.dt, 0.01).values, weekly.values);
}

TEST(Observe, RejectsBadDesigns) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const PricePath p = flat_path(g, 100.0);
  EXPECT_THROW(observe(p, 0.015, 0.01), std::invalid_argument);
  EXPECT_THROW(observe(p, 0.005, 0.01), std::invalid_argument);
  EXPECT_THROW(observe(p, 0.03, 0.01), std::invalid_argument);  // 0.03 does not divide 1
  EXPECT_THROW(observe(p, 0.02, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(observe(p, 0.02, 0.01));
}

TEST(RealizedVariance, Examples) {
  ObservationSeries flat{1.0, 0.01, {0.0, 1.0, 2.0}, {100.0, 100.0, 100.0}};
  EXPECT_EQ(realized_variance(flat), 0.0);
  ObservationSeries one{1.0, 0.01, {0.0, 1.0}, {100.0, 110.0}};
  EXPECT_NEAR(realized_variance(one), 0.009084, 1e-6);
  EXPECT_NEAR(realized_variance(one), std::pow(std::log(1.1), 2), 1e-15);
  ObservationSeries short_series{1.0, 0.01, {0.0}, {100.0}};
  EXPECT_THROW(realized_variance(short_series), std::invalid_argument);
}

TEST(RealizedVariance, CoarseTickSignalsInvalidDesign) {
  const GridSpec g = daily_grid();
  const ObservationSeries s = observe(flat_path(g, 100.0), 1.0 / 252.0, 1000.0);
  EXPECT_THROW(realized_variance(s), std::domain_error);
}

TEST(RealizedVariance, MatchesQuadraticVariation) {
  const GridSpec g = daily_grid();
  const ParamPath mu = constant_path(g, 0.05, 0.2);
  MeanAccumulator rv;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    rv.add(realized_variance(observe(integrate(mu, brownian(g, 3, i), 100.0, 0.05), 1.0 / 252.0, 1e-4)));
  }
  EXPECT_NEAR(rv.mean(), 0.04, 3.0 * rv.standard_error());
}

TEST(KolmogorovSmirnov, Examples) {
  const std::vector<double> xs{1.0, 2.0, 2.0, 5.0};
  const TestResult same = ks_two_sample(xs, std::vector<double>{5.0, 2.0, 1.0, 2.0});
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  EXPECT_FALSE(same.rejected);
  EXPECT_EQ(ks_statistic(xs, std::vector<double>{6.0, 7.0}), 1.0);
  EXPECT_THROW(ks_statistic(xs, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, xs), std::invalid_argument);
}

TEST(KolmogorovSmirnov, TinySamplesAgainstPermutationOracle) {
  const std::vector<double> xs{1.0, 2.0, 3.0}, ys{1.5, 2.5};
  const TestResult t = ks_two_sample(xs, ys);
  EXPECT_DOUBLE_EQ(t.statistic, brute_force_ks(xs, ys));
  EXPECT_DOUBLE_EQ(t.statistic, 1.0 / 3.0);
  // Every split of five values into 3 + 2 reaches D = 1/3.
  EXPECT_EQ(permutation_p(xs, ys), 1.0);
  EXPECT_GT(t.p_value, 0.9);
  EXPECT_FALSE(t.rejected);
}

TEST(KolmogorovSmirnov, AsymptoticPValueTracksPermutationPValue) {
  // Sizes 40 + 50, where the asymptotic law applies; the oracle is a
  // randomized permutation p-value from 4000 relabelings.
  CounterRng rng(5, StreamTag::Coefficient, 0);
  CounterRng shuffle(5, StreamTag::Bridge, 0);
  for (double shift : {0.0, 0.3, 0.6}) {
    std::vector<double> xs(40), ys(50);
    for (double& x : xs) x = rng.normal();
    for (double& y : ys) y = rng.normal() + shift;
    const TestResult t = ks_two_sample(xs, ys);
    EXPECT_DOUBLE_EQ(t.statistic, brute_force_ks(xs, ys));
    std::vector<double> pooled = xs;
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    std::size_t extreme = 0;
    const std::size_t draws = 4000;
    for (std::size_t k = 0; k < draws; ++k) {
      for (std::size_t i = pooled.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(shuffle.uniform() * static_cast<double>(i + 1));
        std::swap(pooled[i], pooled[std::min(j, i)]);
      }
      const std::vector<double> a(pooled.begin(), pooled.begin() + 40), b(pooled.begin() + 40, pooled.end());
      if (ks_statistic(a, b) >= t.statistic - 1e-12) ++extreme;
    }
    const double p = static_cast<double>(extreme) / static_cast<double>(draws);
    EXPECT_NEAR(t.p_value, p, 0.03 + 3.0 * std::sqrt(p * (1.0 - p) / draws)) << "shift " << shift;
  }
}

TEST(KolmogorovSmirnov, InvariantUnderMonotoneTransform) {
  CounterRng rng(6, StreamTag::Coefficient, 0);
  std::vector<double> xs(50), ys(70);
  for (double& x : xs) x = std::exp(rng.normal());
  for (double& y : ys) y = std::exp(0.3 + rng.normal());
  std::vector<double> lx(xs.size()), ly(ys.size());
  std::transform(xs.begin(), xs.end(), lx.begin(), [](double x) { return std::log(x); });
  std::transform(ys.begin(), ys.end(), ly.begin(), [](double y) { return std::log(y); });
  const double d = ks_statistic(xs, ys);
  EXPECT_NEAR(ks_statistic(lx, ly), d, 1e-12);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1.0);
}

TEST(KolmogorovSmirnov, SurvivalFunction) {
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
  // Tabulated: Q(1.36) = 0.0494, Q(1.63) = 0.0098.
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_survival(1.63), 0.0098, 2e-4);
  EXPECT_LT(kolmogorov_survival(3.0), 1e-7);
}

TEST(Indistinguishability, NullCalibration) {
  const DistinguishSettings s{1.0 / 252.0, 1e-4, 0.05, 200, 64};
  const RejectionRate r = indistinguishability_experiment(ModelSpec{}, daily_grid(), std::nullopt, s, 7);
  EXPECT_EQ(r.n_trials, 200u);
  EXPECT_NEAR(r.rate, 0.05, band_half_width(0.05, 200));
  EXPECT_LE(r.ci_low, r.rate);
  EXPECT_GE(r.ci_high, r.rate);
}

TEST(Indistinguishability, CoarseSmoothingIsDetected) {
  const DistinguishSettings s{1.0 / 252.0, 1e-4, 0.05, 200, 64};
  const RejectionRate r =
      indistinguishability_experiment(ModelSpec{}, daily_grid(), FilterSpec::gaussian(0.5), s, 7);
  EXPECT_GT(r.rate, 0.05 + band_half_width(0.05, 200));
}

TEST(Indistinguishability, RejectsBadDesigns) {
  const GridSpec g = daily_grid();
  EXPECT_THROW(indistinguishability_experiment(ModelSpec{}, g, std::nullopt,
                                               DistinguishSettings{1.0 / 252.0, 1e-4, 0.05, 50, 64}, 1),
               std::invalid_argument);
  EXPECT_THROW(indistinguishability_experiment(ModelSpec{}, g, FilterSpec::gaussian(0.005),
                                               DistinguishSettings{}, 1),
               std::invalid_argument);
}

TEST(PowerCurve, RowsMatchSingleExperiments) {
  const GridSpec g = daily_grid();
  const DistinguishSettings s{1.0 / 252.0, 1e-4, 0.05, 100, 16};
  const std::vector<double> one{0.2};
  const auto rows = power_curve(ModelSpec{}, g, FilterKind::Gaussian, one, s, 9, true);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].epsilon, 0.0);
  const RejectionRate null = indistinguishability_experiment(ModelSpec{}, g, std::nullopt, s, 9);
  const RejectionRate alt =
      indistinguishability_experiment(ModelSpec{}, g, FilterSpec::gaussian(0.2), s, 9);
  EXPECT_EQ(rows[0].result.rejections, null.rejections);
  EXPECT_EQ(rows[1].epsilon, 0.2);
  EXPECT_EQ(rows[1].result.rejections, alt.rejections);
  EXPECT_EQ(rows[1].result.ci_low, alt.ci_low);
  EXPECT_EQ(power_curve(ModelSpec{}, g, FilterKind::Gaussian, one, s, 9).front().result.rejections,
            alt.rejections);
  EXPECT_TRUE(power_curve(ModelSpec{}, g, FilterKind::Gaussian, {}, s, 9).empty());
}

TEST(PowerCurve, PowerFallsWithBandwidth) {
  const GridSpec g = daily_grid();
  const DistinguishSettings s{1.0 / 252.0, 1e-4, 0.05, 100, 64};
  const std::vector<double> eps{0.5, 0.2, 0.05};
  const auto rows = power_curve(ModelSpec{}, g, FilterKind::Gaussian, eps, s, 10);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    // Non-increasing up to overlap of the confidence intervals.
    EXPECT_LE(rows[i + 1].result.ci_low, rows[i].result.ci_high) << eps[i + 1];
  }
  EXPECT_GT(rows.front().result.rate, rows.back().result.rate);
}
