#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mollify/metrics.hpp"
#include "mollify/sde.hpp"

using namespace mollify;

namespace {

ParamPath constant_path(const GridSpec& g, double a, double sigma) {
  const std::size_t n = g.model_count();
  return {g, PathDomain::Model, std::vector<double>(n, a), std::vector<double>(n, sigma), {}};
}

ModelSpec clamped_linear(double amplitude) {
  ModelSpec spec;
  ClosedLoopLaw law;
  law.driver = ConstantLaw{0.05, 0.2};
  law.map = {ClosedLoopMapId::ClampedLinear, 0.05, 0.2, amplitude, std::log(100.0)};
  spec.law = law;
  return spec;
}

double max_node_gap(const PricePath& coarse, const PricePath& fine, std::size_t factor) {
  double m = 0.0;
  for (std::size_t k = 0; k < coarse.R.size(); ++k) {
    m = std::max(m, std::abs(coarse.R[k] - fine.R[k * factor]));
  }
  return m;
}

}  // namespace

TEST(Brownian, Deterministic) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  EXPECT_EQ(brownian(g, 3, 7).dw, brownian(g, 3, 7).dw);
  EXPECT_NE(brownian(g, 3, 7).dw, brownian(g, 3, 8).dw);
  EXPECT_EQ(brownian(g, 3).dw.size(), g.model_count() - 1);
}

TEST(Brownian, IncrementMoments) {
  // 10^6 increments at h = 0.01: 8000 paths of 125 steps.
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const double h = 0.01;
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (std::uint64_t i = 0; i < 8000; ++i) {
    for (double x : brownian(g, 1, i).dw) {
      sum += x;
      sum_sq += x * x;
      ++n;
    }
  }
  ASSERT_EQ(n, 1000000u);
  const double mean = sum / static_cast<double>(n);
  EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(h / static_cast<double>(n)));
  const double var = sum_sq / static_cast<double>(n) - mean * mean;
  EXPECT_NEAR(var, h, 0.01 * h);
}

TEST(Integrate, ZeroVolatilityGrowsExponentially) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const PricePath p = integrate(constant_path(g, 0.05, 0.0), brownian(g, 2), 100.0, 0.05);
  EXPECT_EQ(p.R.front(), std::log(100.0));
  EXPECT_NEAR(p.S(p.R.size() - 1), 100.0 * std::exp(0.0625), 1e-10);
}

TEST(Integrate, DiscountedPriceIsMartingale) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const double r = 0.05;
  const ParamPath mu = constant_path(g, r, 0.2);
  const std::vector<std::size_t> checked{25, 60, 100, g.model_count() - 1};
  std::vector<MeanAccumulator> acc(checked.size());
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const PricePath p = integrate(mu, brownian(g, 4, i), 100.0, r);
    for (std::size_t c = 0; c < checked.size(); ++c) {
      const std::size_t k = checked[c];
      const double elapsed = p.time_at(k) + 1.0;
      acc[c].add(std::exp(-r * elapsed) * p.S(k) / 100.0);
    }
  }
  for (const MeanAccumulator& m : acc) EXPECT_NEAR(m.mean(), 1.0, 3.0 * m.standard_error());
}

TEST(Integrate, ConstantCoefficientsUnrollExactly) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const double a = 0.07, sigma = 0.3;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const BrownianIncrements bw = brownian(g, 5, i);
    const PricePath p = integrate(constant_path(g, a, sigma), bw, 100.0, 0.05);
    const double w = std::accumulate(bw.dw.begin(), bw.dw.end(), 0.0);
    EXPECT_NEAR(p.R.back(), std::log(100.0) + (a - 0.5 * sigma * sigma) * 1.25 + sigma * w, 1e-12);
  }
}

TEST(Integrate, PricesStayPositiveAndFinite) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const PricePath p = integrate(constant_path(g, 1.0, 3.0), brownian(g, 6, i), 100.0, 0.05);
    for (std::size_t k = 0; k < p.R.size(); ++k) {
      const double s = p.S(k);
      ASSERT_TRUE(std::isfinite(s));
      ASSERT_GT(s, 0.0);
    }
  }
}

TEST(Integrate, RejectsMismatchAndNonFinite) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const GridSpec other = GridSpec::make(1.0, 0.25, 0.5, 0.005);
  EXPECT_THROW(integrate(constant_path(g, 0.05, 0.2), brownian(other, 1), 100.0, 0.05),
               std::invalid_argument);
  ParamPath bad = constant_path(g, 0.05, 0.2);
  bad.sigma[10] = NAN;
  EXPECT_THROW(integrate(bad, brownian(g, 1), 100.0, 0.05), std::invalid_argument);
}

TEST(Refinement, BridgePreservesCoarseIncrements) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const GridSpec fine = GridSpec::make(1.0, 0.25, 0.5, 0.01 / 8);
  const BrownianIncrements bw = brownian(g, 9);
  const BrownianIncrements back = coarsen(refine_bridge(bw, fine, 8, 9), g, 8);
  for (std::size_t k = 0; k < bw.dw.size(); ++k) ASSERT_NEAR(back.dw[k], bw.dw[k], 1e-14);
}

TEST(Refinement, ConstantCoefficientsAreGridFree) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const GridSpec fine = GridSpec::make(1.0, 0.25, 0.5, 0.01 / 8);
  const BrownianIncrements bw = brownian(g, 10);
  const PricePath coarse = integrate(constant_path(g, 0.05, 0.2), bw, 100.0, 0.05);
  const PricePath ref =
      integrate(constant_path(fine, 0.05, 0.2), refine_bridge(bw, fine, 8, 10), 100.0, 0.05);
  EXPECT_LT(max_node_gap(coarse, ref, 8), 1e-12);
}

TEST(ClosedLoop, ConstantMapReducesToIntegrate) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  ModelSpec spec = clamped_linear(0.0);
  std::get<ClosedLoopLaw>(spec.law).map.id = ClosedLoopMapId::Constant;
  const BrownianIncrements bw = brownian(g, 11);
  const auto loop = integrate_closed_loop(spec, sample_driver(spec, g, 11), bw, 100.0, 0.05);
  const PricePath direct = integrate(constant_path(g, 0.05, 0.2), bw, 100.0, 0.05);
  EXPECT_EQ(loop.price.R, direct.R);
}

TEST(ClosedLoop, ZeroAmplitudeIgnoresPrice) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const ModelSpec spec = clamped_linear(0.0);
  const auto loop =
      integrate_closed_loop(spec, sample_driver(spec, g, 12), brownian(g, 12), 100.0, 0.05);
  for (double s : loop.realized.sigma) ASSERT_EQ(s, 0.2);
}

TEST(ClosedLoop, StrongConvergenceUnderRefinement) {
  // Reference: the same Brownian path on an 8x finer grid.  The strong
  // error E max|dR| is averaged over seeds; a single seed's ratio is too
  // noisy to bracket.
  const double h = 0.01;
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, h);
  const GridSpec half = GridSpec::make(1.0, 0.25, 0.5, h / 2);
  const GridSpec fine = GridSpec::make(1.0, 0.25, 0.5, h / 8);
  const ModelSpec spec = clamped_linear(0.4);
  double err_h = 0.0, err_half = 0.0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const BrownianIncrements bw = brownian(g, seed);
    const BrownianIncrements bw_fine = refine_bridge(bw, fine, 8, seed);
    const BrownianIncrements bw_half = coarsen(bw_fine, half, 4);
    auto run = [&](const GridSpec& grid, const BrownianIncrements& w) {
      return integrate_closed_loop(spec, sample_driver(spec, grid, seed), w, 100.0, 0.05).price;
    };
    const PricePath ref = run(fine, bw_fine);
    err_h += max_node_gap(run(g, bw), ref, 8);
    err_half += max_node_gap(run(half, bw_half), ref, 4);
  }
  ASSERT_GT(err_half, 0.0);
  const double ratio = err_h / err_half;
  EXPECT_GE(ratio, 1.3);
  EXPECT_LE(ratio, 3.0);
}

TEST(ClosedLoop, RejectsExogenousSpec) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  ModelSpec spec;
  ParamPath driver = constant_path(g, 0.05, 0.2);
  driver.y = driver.sigma;
  EXPECT_THROW(integrate_closed_loop(spec, driver, brownian(g, 1), 100.0, 0.05),
               std::invalid_argument);
}

TEST(Paired, EqualCoefficientsGiveIdenticalPaths) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  ModelSpec spec;
  const ParamPath mu = sample_exogenous(spec, g, 14);
  const auto [p, q] = integrate_paired(mu, mu, brownian(g, 14), 100.0, 0.05);
  EXPECT_EQ(p.R, q.R);
}

TEST(Paired, IncrementsAgreeWhereCoefficientsAgree) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 0.5, 0.01);
  const ParamPath mu = constant_path(g, 0.05, 0.2);
  ParamPath other = mu;
  // Alter the coefficients on [-1, -1/2] only.
  for (std::size_t k = 0; k <= 50; ++k) {
    other.sigma[k] = 0.4;
    other.a[k] = 0.1;
  }
  const auto [p, q] = integrate_paired(mu, other, brownian(g, 15), 100.0, 0.05);
  EXPECT_NE(p.R[50], q.R[50]);
  for (std::size_t k = 51; k + 1 < p.R.size(); ++k) {
    ASSERT_NEAR(p.R[k + 1] - p.R[k], q.R[k + 1] - q.R[k], 1e-14);
  }
  EXPECT_NE(p.R.back(), q.R.back());
}

TEST(Paired, SmallerBandwidthIsCloserOnMostSeeds) {
  const GridSpec g = GridSpec::make(1.0, 0.25, 2.0, 0.005);
  const ModelSpec spec;
  int closer = 0;
  for (std::uint64_t i = 0; i < 64; ++i) {
    const PairedSample narrow = paired_sample(spec, g, FilterSpec::gaussian(0.05), 16, i);
    const PairedSample wide = paired_sample(spec, g, FilterSpec::gaussian(0.2), 16, i);
    closer += sup_distance(narrow.price, narrow.price_eps, 2.0) <
                      sup_distance(wide.price, wide.price_eps, 2.0)
                  ? 1
                  : 0;
  }
  EXPECT_GT(closer, 32);
}
