#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mollify/grid.hpp"
#include "mollify/params.hpp"

namespace mollify {

/// Brownian increments over the model interval [-delta, T]; dw[k] is the
/// increment over [t_k, t_{k+1}].
struct BrownianIncrements {
  GridSpec grid;
  std::vector<double> dw;
  std::uint64_t seed = 0;
};

/// Log-price path over the model interval; R[0] = log S0 at t = -delta.
struct PricePath {
  GridSpec grid;
  std::vector<double> R;
  double S0 = 0.0;

  double S(std::size_t k) const;
  double time_at(std::size_t k) const { return grid.time(grid.lookback_begin() + k); }
};

/// i.i.d. N(0, h) increments from the stream (seed, Brownian, path_index).
BrownianIncrements brownian(const GridSpec& grid, std::uint64_t seed,
                            std::uint64_t path_index = 0);

/// Subdivides every increment into `factor` pieces by Brownian-bridge
/// sampling, so the refined path passes through the coarse path's nodes.
/// `fine_grid` must have step coarse.h / factor and the same lengths.
BrownianIncrements refine_bridge(const BrownianIncrements& coarse,
                                 const GridSpec& fine_grid, std::size_t factor,
                                 std::uint64_t seed, std::uint64_t path_index = 0);

/// Sums consecutive groups of `factor` increments (inverse of refine_bridge).
BrownianIncrements coarsen(const BrownianIncrements& fine, const GridSpec& coarse_grid,
                           std::size_t factor);

/// Log-Euler recursion with coefficients frozen at the left node:
///   R_{k+1} = R_k + (a_k - sigma_k^2 / 2) h + sigma_k dw_k.
/// Accepts model-domain or extended ParamPaths. The drift argument r is
/// accepted for interface symmetry; the price dynamics only use a.
PricePath integrate(const ParamPath& params, const BrownianIncrements& bw, double S0,
                    double r);

struct ClosedLoopResult {
  PricePath price;
  ParamPath realized;
};

/// Closed-loop integration: at each step (a_k, sigma_k) = M(y_k, R_k, t_k).
/// `driver` supplies y (model or extended domain).
ClosedLoopResult integrate_closed_loop(const ModelSpec& spec, const ParamPath& driver,
                                       const BrownianIncrements& bw, double S0, double r);

/// Both integrations consume the same Brownian increments.
std::pair<PricePath, PricePath> integrate_paired(const ParamPath& params,
                                                 const ParamPath& params_mollified,
                                                 const BrownianIncrements& bw, double S0,
                                                 double r);

}  // namespace mollify
