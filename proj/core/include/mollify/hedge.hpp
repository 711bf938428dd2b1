#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mollify/grid.hpp"
#include "mollify/params.hpp"
#include "mollify/sde.hpp"

namespace mollify {

/// European call expiring at the end of the trading window.  K = 0 is
/// accepted as the degenerate claim paying S(T).
struct ClaimSpec {
  double K = 100.0;

  double payoff(double S) const { return S > K ? S - K : 0.0; }
};

/// Portfolio held after rebalancing at `time`: wealth = beta B + gamma S.
struct Position {
  double time = 0.0;
  double S = 0.0;
  double B = 0.0;
  double wealth = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
};

struct HedgeReport {
  double X0 = 0.0;
  double terminal_wealth = 0.0;
  double payoff = 0.0;
  double terminal_error = 0.0;  // terminal_wealth - payoff, undiscounted
  std::size_t n_rebalance = 0;
  std::vector<Position> positions;
};

/// Trapezoidal integral of sigma^2 over a uniformly sampled interval.
double integrated_variance(std::span<const double> sigma, double h);

/// Remaining variance v[k] = int_{t_k}^T sigma^2 ds at every sample node
/// (v.back() == 0).
std::vector<double> remaining_variance(std::span<const double> sigma, double h);

/// Lognormal call value with total variance v over time to expiry tau.
/// v = 0 gives the discounted intrinsic value max(S - K e^{-r tau}, 0).
double call_price(double S, double K, double r, double tau, double v);

/// dC/dS of call_price.
double call_delta(double S, double K, double r, double tau, double v);

/// Uniform: every (steps / n)-th node of [0, T].  Variance: nodes at equal
/// increments of the assumed integrated variance ("business time"), which
/// coincides with Uniform for a constant volatility.
enum class RebalanceSchedule { Uniform, Variance };

RebalanceSchedule parse_schedule(std::string_view name);

/// The n rebalance indices (into the nodes of [0, T], first is 0) implied by
/// a remaining-variance curve.  Uniform requires n | steps.
std::vector<std::size_t> rebalance_nodes(std::span<const double> remaining_var,
                                         std::size_t n_rebalance, RebalanceSchedule schedule);

/// Delta hedge on the trading window using the given remaining-variance
/// curve (one value per node of [0, T]), rebalancing at rebalance_nodes().
/// This is the recursion shared by both hedging modes.
HedgeReport delta_hedge(const PricePath& S, std::span<const double> remaining_var,
                        const ClaimSpec& claim, double r, std::size_t n_rebalance,
                        RebalanceSchedule schedule = RebalanceSchedule::Uniform);

/// Replication in the mollified model: sigma_eps on [0, T] (one value per
/// node of [0, T]) is known at t = 0, so X0 and every hedge ratio use the
/// exact remaining variance.  Throws if sigma_eps vanishes on [0, T].
HedgeReport replicate_complete(const PricePath& S_eps, std::span<const double> sigma_eps,
                               const ClaimSpec& claim, double r, std::size_t n_rebalance,
                        RebalanceSchedule schedule = RebalanceSchedule::Uniform);

/// Volatility assumption formed at t = 0: remaining variance per node of
/// [0, T].
struct VolAssumption {
  std::vector<double> remaining_var;

  static VolAssumption scalar(double vol, const GridSpec& grid);
  static VolAssumption curve(std::vector<double> remaining_var) { return {std::move(remaining_var)}; }
};

/// Conditional expectation E[int_t^T sigma^2 ds | state at 0] for the
/// two-state chain, per node of [0, T].  state_at_zero = -1 conditions on
/// nothing (stationary start), giving E[sigma^2] (T - t).
VolAssumption expected_regime_variance(const RegimeSwitchLaw& law, int state_at_zero,
                                       const GridSpec& grid);

/// State whose level is closest to sigma.
int regime_state(const RegimeSwitchLaw& law, double sigma);

/// Hedge in the original model under an assumption fixed at t = 0.
HedgeReport hedge_incomplete(const PricePath& S, const ClaimSpec& claim, double r,
                             std::size_t n_rebalance, const VolAssumption& assumption,
                             RebalanceSchedule schedule = RebalanceSchedule::Uniform);

/// theta = (a - r) / sigma, node by node.
std::vector<double> market_price_of_risk(std::span<const double> a, std::span<const double> sigma,
                                         double r);

/// exp(-1/2 sum theta_k^2 h - sum theta_k dw_k) with theta frozen at the left
/// node of each increment.  theta needs at least dw.size() values.
double girsanov_weight(std::span<const double> theta, std::span<const double> dw, double h);

/// Trading-window views of model-domain arrays: nodes of [0, T] and the
/// increments between them.
std::span<const double> horizon_view(std::span<const double> model_values, const GridSpec& grid);
std::span<const double> horizon_increments(const BrownianIncrements& bw);

}  // namespace mollify
