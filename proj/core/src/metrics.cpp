#include "mollify/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mollify/parallel.hpp"

namespace mollify {

double MeanAccumulator::mean() const {
  return n_ == 0 ? 0.0 : sum_ / static_cast<double>(n_);
}

double MeanAccumulator::standard_error() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double m = sum_ / n;
  const double var = std::max(0.0, (sum_sq_ - n * m * m) / (n - 1.0));
  return std::sqrt(var / n);
}

namespace {

void check_q(double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("distance exponent q must be >= 1");
}

void check_pair(const PricePath& S, const PricePath& S_eps) {
  if (!(S.grid == S_eps.grid) || S.R.size() != S_eps.R.size()) {
    throw std::invalid_argument("price distance: grid mismatch");
  }
  if (S.S0 != S_eps.S0) throw std::invalid_argument("price distance: initial prices differ");
}

}  // namespace

double coeff_distance(const ParamPath& mu, const ParamPath& mu_eps, double q, double t_begin,
                      double t_end) {
  check_q(q);
  if (!(mu.grid == mu_eps.grid)) throw std::invalid_argument("coeff_distance: grid mismatch");
  const auto a = mu.model_a(), s = mu.model_sigma();
  const auto ae = mu_eps.model_a(), se = mu_eps.model_sigma();
  const GridSpec& g = mu.grid;
  const double h = g.h();
  const double t0 = g.time(g.lookback_begin());
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((t_begin - t0) / h - 1e-9)));
  const auto last = std::min<std::size_t>(
      g.model_count() - 1, static_cast<std::size_t>(std::max(0.0, std::floor((t_end - t0) / h + 1e-9))));
  if (last <= first) return 0.0;
  auto integrand = [&](std::size_t k) {
    const double da = ae[k] - a[k];
    const double ds = se[k] - s[k];
    return std::pow(std::hypot(da, ds), q);
  };
  double acc = 0.5 * (integrand(first) + integrand(last));
  for (std::size_t k = first + 1; k < last; ++k) acc += integrand(k);
  return acc * h;
}

double coeff_distance(const ParamPath& mu, const ParamPath& mu_eps, double q) {
  return coeff_distance(mu, mu_eps, q, -mu.grid.delta(), mu.grid.horizon());
}

double sup_distance(const PricePath& S, const PricePath& S_eps, double q) {
  check_q(q);
  check_pair(S, S_eps);
  double worst = 0.0;
  for (std::size_t k = 0; k < S.R.size(); ++k) {
    worst = std::max(worst, std::abs(std::exp(S_eps.R[k]) - std::exp(S.R[k])));
  }
  return std::pow(worst, q);
}

double log_sup_distance(const PricePath& S, const PricePath& S_eps, double q) {
  check_q(q);
  check_pair(S, S_eps);
  double worst = 0.0;
  for (std::size_t k = 0; k < S.R.size(); ++k) worst = std::max(worst, std::abs(S_eps.R[k] - S.R[k]));
  return std::pow(worst, q);
}

PairedSample paired_sample(const ModelSpec& spec, const GridSpec& grid, const FilterSpec& f,
                           std::uint64_t seed, std::uint64_t path_index) {
  BrownianIncrements bw = brownian(grid, seed, path_index);
  if (spec.kind() == ModelKind::ClosedLoop) {
    const ParamPath driver = sample_driver(spec, grid, seed, path_index);
    const ParamPath driver_eps = mollify_path(extend_boundary(driver, grid), f);
    auto original = integrate_closed_loop(spec, driver, bw, spec.S0, spec.r);
    auto smooth = integrate_closed_loop(spec, driver_eps, bw, spec.S0, spec.r);
    original.realized.y = driver.y;
    smooth.realized.y = driver_eps.y;
    return {std::move(original.realized), std::move(smooth.realized), std::move(original.price),
            std::move(smooth.price), std::move(bw)};
  }
  ParamPath mu = sample_exogenous(spec, grid, seed, path_index);
  ParamPath mu_eps = mollify_path(extend_boundary(mu, grid), f);
  auto [price, price_eps] = integrate_paired(mu, mu_eps, bw, spec.S0, spec.r);
  return {std::move(mu), std::move(mu_eps), std::move(price), std::move(price_eps), std::move(bw)};
}

std::vector<ClosenessReport> convergence_study(const ModelSpec& spec, const GridSpec& grid,
                                               FilterKind kind, std::span<const double> eps_list,
                                               double q, std::size_t n_paths, std::uint64_t seed) {
  check_q(q);
  if (n_paths == 0) throw std::invalid_argument("convergence_study: n_paths must be positive");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("convergence_study: eps_list must be strictly decreasing");
    }
    if (eps_list[i] < 2.0 * grid.h() * (1.0 - 1e-12)) {
      throw std::invalid_argument("convergence_study: epsilon below the resolvability floor 2h");
    }
  }

  struct PathTerms {
    std::vector<double> coeff, sup, log_sup;
  };
  const auto per_path = parallel_map<PathTerms>(n_paths, [&](std::size_t i) {
    PathTerms t;
    for (double eps : eps_list) {
      const PairedSample s = paired_sample(spec, grid, FilterSpec::with_width(kind, eps), seed, i);
      t.coeff.push_back(coeff_distance(s.mu, s.mu_eps, q));
      t.sup.push_back(sup_distance(s.price, s.price_eps, q));
      t.log_sup.push_back(log_sup_distance(s.price, s.price_eps, q));
    }
    return t;
  });

  std::vector<ClosenessReport> out;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    MeanAccumulator coeff, sup, log_sup;
    for (const PathTerms& t : per_path) {
      coeff.add(t.coeff[e]);
      sup.add(t.sup[e]);
      log_sup.add(t.log_sup[e]);
    }
    out.push_back({q, eps_list[e], n_paths, {coeff.mean(), coeff.standard_error()},
                   {sup.mean(), sup.standard_error()}, {log_sup.mean(), log_sup.standard_error()}});
  }
  return out;
}

}  // namespace mollify
