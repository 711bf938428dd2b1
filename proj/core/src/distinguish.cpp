#include "mollify/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mollify/parallel.hpp"

namespace mollify {

double round_to_tick(double x, double tick) {
  if (!(tick > 0.0)) throw std::invalid_argument("round_to_tick: tick must be positive");
  // nearbyint follows the default rounding mode, which is ties-to-even.
  return std::nearbyint(x / tick) * tick;
}

ObservationSeries observe(const PricePath& path, double dt, double tick) {
  const GridSpec& g = path.grid;
  std::size_t stride = 0;
  if (!(dt >= g.h() * (1.0 - 1e-12)) || !is_multiple_of(dt, g.h(), &stride) || stride == 0) {
    throw std::invalid_argument("observe: dt must be a positive multiple of h");
  }
  if (g.lookback_steps() % stride != 0) {
    throw std::invalid_argument("observe: dt must divide the observation window length");
  }
  if (!(tick > 0.0)) throw std::invalid_argument("observe: tick must be positive");
  ObservationSeries out{dt, tick, {}, {}};
  for (std::size_t k = 0; k <= g.lookback_steps(); k += stride) {
    out.times.push_back(path.time_at(k));
    out.values.push_back(round_to_tick(std::exp(path.R[k]), tick));
  }
  return out;
}

ObservationSeries observe(const ObservationSeries& series, double dt, double tick) {
  std::size_t stride = 0;
  if (!is_multiple_of(dt, series.dt, &stride) || stride == 0) {
    throw std::invalid_argument("observe: dt must be a positive multiple of the series step");
  }
  ObservationSeries out{dt, tick, {}, {}};
  for (std::size_t k = 0; k < series.values.size(); k += stride) {
    out.times.push_back(series.times[k]);
    out.values.push_back(round_to_tick(series.values[k], tick));
  }
  return out;
}

double realized_variance(const ObservationSeries& series) {
  if (series.values.size() < 2) throw std::invalid_argument("realized_variance: need >= 2 samples");
  double acc = 0.0;
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    if (!(series.values[k] > 0.0)) {
      throw std::domain_error("realized_variance: non-positive observation (tick too coarse)");
    }
    if (k > 0) {
      const double ret = std::log(series.values[k] / series.values[k - 1]);
      acc += ret * ret;
    }
  }
  return acc;
}

double ks_statistic(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double odd = 2.0 * j - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> xs, std::span<const double> ys, double alpha) {
  const double d = ks_statistic(xs, ys);
  const double n = static_cast<double>(xs.size()), m = static_cast<double>(ys.size());
  const double en = std::sqrt(n * m / (n + m));
  const double p = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
  return {d, p, p < alpha};
}

PricePath simulate_price(const ModelSpec& spec, const GridSpec& grid,
                         const std::optional<FilterSpec>& filter, std::uint64_t seed,
                         std::uint64_t path_index) {
  const BrownianIncrements bw = brownian(grid, seed, path_index);
  if (spec.kind() == ModelKind::ClosedLoop) {
    ParamPath driver = sample_driver(spec, grid, seed, path_index);
    if (filter) driver = mollify_path(extend_boundary(driver, grid), *filter);
    return integrate_closed_loop(spec, driver, bw, spec.S0, spec.r).price;
  }
  ParamPath mu = sample_exogenous(spec, grid, seed, path_index);
  if (filter) mu = mollify_path(extend_boundary(mu, grid), *filter);
  return integrate(mu, bw, spec.S0, spec.r);
}

namespace {

RejectionRate summarize(std::size_t trials, std::size_t rejections) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(rejections) / n;
  constexpr double z = 1.959963984540054;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {trials, rejections, p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace

namespace {

void check_design(const DistinguishSettings& s) {
  if (s.n_trials == 0 || s.n_paths_per_trial == 0) {
    throw std::invalid_argument("indistinguishability_experiment: empty design");
  }
  if (s.n_trials < 100) {
    throw std::invalid_argument("indistinguishability_experiment: need n_trials >= 100");
  }
}

/// Realized variance of every observation window of one world, by stream
/// index.  The original model uses indices [0, per_world), the second world
/// [per_world, 2 per_world).
std::vector<double> window_features(const ModelSpec& spec, const GridSpec& grid,
                                    const std::optional<FilterSpec>& filter,
                                    const DistinguishSettings& s, std::uint64_t seed,
                                    bool second_world) {
  if (filter && filter->kind == FilterKind::Gaussian &&
      filter->epsilon < 2.0 * grid.h() * (1.0 - 1e-12)) {
    throw std::invalid_argument("indistinguishability_experiment: epsilon below 2h");
  }
  const std::size_t per_world = s.n_trials * s.n_paths_per_trial;
  const std::size_t offset = second_world ? per_world : 0;
  return parallel_map<double>(per_world, [&](std::size_t index) {
    const auto path = simulate_price(spec, grid, filter, seed, offset + index);
    return realized_variance(observe(path, s.dt, s.tick));
  });
}

RejectionRate compare_worlds(std::span<const double> xs, std::span<const double> ys,
                             const DistinguishSettings& s) {
  std::size_t rejections = 0;
  for (std::size_t trial = 0; trial < s.n_trials; ++trial) {
    const std::size_t first = trial * s.n_paths_per_trial;
    if (ks_two_sample(xs.subspan(first, s.n_paths_per_trial), ys.subspan(first, s.n_paths_per_trial),
                      s.alpha)
            .rejected) {
      ++rejections;
    }
  }
  return summarize(s.n_trials, rejections);
}

}  // namespace

RejectionRate indistinguishability_experiment(const ModelSpec& spec, const GridSpec& grid,
                                              const std::optional<FilterSpec>& filter,
                                              const DistinguishSettings& s, std::uint64_t seed) {
  check_design(s);
  const auto xs = window_features(spec, grid, std::nullopt, s, seed, false);
  const auto ys = window_features(spec, grid, filter, s, seed, true);
  return compare_worlds(xs, ys, s);
}

std::vector<PowerRow> power_curve(const ModelSpec& spec, const GridSpec& grid, FilterKind kind,
                                  std::span<const double> eps_list, const DistinguishSettings& s,
                                  std::uint64_t seed, bool null_calibration) {
  std::vector<PowerRow> rows;
  if (eps_list.empty() && !null_calibration) return rows;
  check_design(s);
  // The original-model sample is the same for every row.
  const auto xs = window_features(spec, grid, std::nullopt, s, seed, false);
  if (null_calibration) {
    rows.push_back({0.0, compare_worlds(xs, window_features(spec, grid, std::nullopt, s, seed, true), s)});
  }
  for (double eps : eps_list) {
    const auto ys = window_features(spec, grid, FilterSpec::with_width(kind, eps), s, seed, true);
    rows.push_back({eps, compare_worlds(xs, ys, s)});
  }
  return rows;
}

}  // namespace mollify
