#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mollify/filter.hpp"
#include "mollify/params.hpp"
#include "mollify/sde.hpp"

namespace mollify {

/// What an econometrician sees on the observation window [-delta, 0]:
/// prices sampled every dt and rounded to the tick grid.
struct ObservationSeries {
  double dt = 0.0;
  double tick = 0.0;
  std::vector<double> times;
  std::vector<double> values;
};

/// Round half to even onto multiples of tick.
double round_to_tick(double x, double tick);

/// Subsamples [-delta, 0] every dt (a multiple of h dividing delta) and
/// rounds to tick.
ObservationSeries observe(const PricePath& path, double dt, double tick);

/// Re-observes a series (dt must be a multiple of series.dt).
ObservationSeries observe(const ObservationSeries& series, double dt, double tick);

/// Sum of squared log returns.  Throws std::domain_error if a rounded value
/// is not positive.
double realized_variance(const ObservationSeries& series);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool rejected = false;
};

/// sup_x |F_xs(x) - F_ys(x)| over the pooled sample.
double ks_statistic(std::span<const double> xs, std::span<const double> ys);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q((sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D), ne = n m / (n + m).
TestResult ks_two_sample(std::span<const double> xs, std::span<const double> ys,
                         double alpha = 0.05);

struct RejectionRate {
  std::size_t n_trials = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval
  double ci_high = 0.0;
};

struct DistinguishSettings {
  double dt = 1.0 / 252.0;
  double tick = 1e-4;
  double alpha = 0.05;
  std::size_t n_trials = 200;
  std::size_t n_paths_per_trial = 64;
};

/// Price path of the model, or of its mollified twin when `filter` is set,
/// from the coefficient and Brownian streams of `path_index`.
PricePath simulate_price(const ModelSpec& spec, const GridSpec& grid,
                         const std::optional<FilterSpec>& filter, std::uint64_t seed,
                         std::uint64_t path_index);

/// Per trial: realized variances of n_paths_per_trial observation windows of
/// the original model against as many of the mollified model (independent
/// draws), compared by ks_two_sample at level alpha.  With no filter the
/// second sample is drawn from the original model too (null calibration).
RejectionRate indistinguishability_experiment(const ModelSpec& spec, const GridSpec& grid,
                                              const std::optional<FilterSpec>& filter,
                                              const DistinguishSettings& settings,
                                              std::uint64_t seed);

struct PowerRow {
  double epsilon = 0.0;
  RejectionRate result;
};

/// One row per entry of eps_list, row for row equal to
/// indistinguishability_experiment.  With null_calibration a first row
/// (epsilon = 0) compares the original model with itself.
std::vector<PowerRow> power_curve(const ModelSpec& spec, const GridSpec& grid, FilterKind kind,
                                  std::span<const double> eps_list,
                                  const DistinguishSettings& settings, std::uint64_t seed,
                                  bool null_calibration = false);

}  // namespace mollify
