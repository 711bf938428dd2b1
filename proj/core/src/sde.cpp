#include "mollify/sde.hpp"

#include <cmath>
#include <stdexcept>

#include "mollify/rng.hpp"

namespace mollify {

double PricePath::S(std::size_t k) const { return std::exp(R.at(k)); }

BrownianIncrements brownian(const GridSpec& grid, std::uint64_t seed,
                            std::uint64_t path_index) {
  const std::size_t n = grid.model_count() - 1;
  BrownianIncrements out{grid, std::vector<double>(n), seed};
  CounterRng rng(seed, StreamTag::Brownian, path_index);
  const double sd = std::sqrt(grid.h());
  for (double& x : out.dw) x = sd * rng.normal();
  return out;
}

namespace {

void check_scaled_grid(const GridSpec& coarse, const GridSpec& fine, std::size_t factor) {
  if (factor == 0 || fine.lookback_steps() != coarse.lookback_steps() * factor ||
      fine.horizon_steps() != coarse.horizon_steps() * factor) {
    throw std::invalid_argument("grid refinement: fine grid is not coarse grid / factor");
  }
}

}  // namespace

BrownianIncrements refine_bridge(const BrownianIncrements& coarse, const GridSpec& fine_grid,
                                 std::size_t factor, std::uint64_t seed,
                                 std::uint64_t path_index) {
  check_scaled_grid(coarse.grid, fine_grid, factor);
  const double h = fine_grid.h();
  BrownianIncrements out{fine_grid, {}, seed};
  out.dw.reserve(coarse.dw.size() * factor);
  CounterRng rng(seed, StreamTag::Bridge, path_index);
  for (double total : coarse.dw) {
    double remaining = total;
    for (std::size_t j = 0; j < factor; ++j) {
      const std::size_t left = factor - j;
      if (left == 1) {
        out.dw.push_back(remaining);
        break;
      }
      // Conditional law of the next piece given the remaining increment.
      const double tau = h * static_cast<double>(left);
      const double mean = remaining * h / tau;
      const double var = h * (tau - h) / tau;
      const double piece = mean + std::sqrt(var) * rng.normal();
      out.dw.push_back(piece);
      remaining -= piece;
    }
  }
  return out;
}

BrownianIncrements coarsen(const BrownianIncrements& fine, const GridSpec& coarse_grid,
                           std::size_t factor) {
  check_scaled_grid(coarse_grid, fine.grid, factor);
  BrownianIncrements out{coarse_grid, std::vector<double>(coarse_grid.model_count() - 1, 0.0),
                         fine.seed};
  for (std::size_t k = 0; k < fine.dw.size(); ++k) out.dw[k / factor] += fine.dw[k];
  return out;
}

PricePath integrate(const ParamPath& params, const BrownianIncrements& bw, double S0,
                    double /*r*/) {
  if (!(params.grid == bw.grid)) throw std::invalid_argument("integrate: grid mismatch");
  if (!(S0 > 0.0)) throw std::invalid_argument("integrate: S0 must be positive");
  const auto a = params.model_a();
  const auto sigma = params.model_sigma();
  const std::size_t n = bw.grid.model_count();
  if (a.size() != n || sigma.size() != n || bw.dw.size() + 1 != n) {
    throw std::invalid_argument("integrate: array length mismatch");
  }
  const double h = bw.grid.h();
  PricePath out{bw.grid, std::vector<double>(n), S0};
  out.R[0] = std::log(S0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(sigma[k])) {
      throw std::invalid_argument("integrate: non-finite coefficient");
    }
    out.R[k + 1] = out.R[k] + (a[k] - 0.5 * sigma[k] * sigma[k]) * h + sigma[k] * bw.dw[k];
  }
  return out;
}

ClosedLoopResult integrate_closed_loop(const ModelSpec& spec, const ParamPath& driver,
                                       const BrownianIncrements& bw, double S0, double /*r*/) {
  if (spec.kind() != ModelKind::ClosedLoop) {
    throw std::invalid_argument("integrate_closed_loop: spec is not ClosedLoop");
  }
  if (!(driver.grid == bw.grid)) throw std::invalid_argument("integrate_closed_loop: grid mismatch");
  if (!(S0 > 0.0)) throw std::invalid_argument("integrate_closed_loop: S0 must be positive");
  const auto y = driver.model_y();
  const std::size_t n = bw.grid.model_count();
  if (y.size() != n || bw.dw.size() + 1 != n) {
    throw std::invalid_argument("integrate_closed_loop: driver has no y values on the grid");
  }
  const double h = bw.grid.h();
  ClosedLoopResult out{PricePath{bw.grid, std::vector<double>(n), S0},
                       ParamPath{bw.grid, PathDomain::Model, std::vector<double>(n),
                                 std::vector<double>(n), {}}};
  auto& R = out.price.R;
  R[0] = std::log(S0);
  for (std::size_t k = 0; k < n; ++k) {
    const Coefficients c = closed_loop_sigma(spec, y[k], R[k], out.price.time_at(k));
    out.realized.a[k] = c.a;
    out.realized.sigma[k] = c.sigma;
    if (k + 1 < n) R[k + 1] = R[k] + (c.a - 0.5 * c.sigma * c.sigma) * h + c.sigma * bw.dw[k];
  }
  return out;
}

std::pair<PricePath, PricePath> integrate_paired(const ParamPath& params,
                                                 const ParamPath& params_mollified,
                                                 const BrownianIncrements& bw, double S0,
                                                 double r) {
  if (!(params.grid == params_mollified.grid)) {
    throw std::invalid_argument("integrate_paired: grid mismatch");
  }
  return {integrate(params, bw, S0, r), integrate(params_mollified, bw, S0, r)};
}

}  // namespace mollify
