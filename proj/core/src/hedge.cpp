#include "mollify/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mollify {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_call_inputs(double S, double K, double tau, double v) {
  if (!(S > 0.0) || !(K >= 0.0) || !(tau >= 0.0) || !(v >= 0.0)) {
    throw std::invalid_argument("call_price: requires S > 0, K >= 0, tau >= 0, v >= 0");
  }
}

}  // namespace

double integrated_variance(std::span<const double> sigma, double h) {
  if (sigma.size() < 2) throw std::invalid_argument("integrated_variance: empty interval");
  double acc = 0.5 * (sigma.front() * sigma.front() + sigma.back() * sigma.back());
  for (std::size_t k = 1; k + 1 < sigma.size(); ++k) acc += sigma[k] * sigma[k];
  return acc * h;
}

std::vector<double> remaining_variance(std::span<const double> sigma, double h) {
  if (sigma.size() < 2) throw std::invalid_argument("remaining_variance: empty interval");
  std::vector<double> v(sigma.size(), 0.0);
  for (std::size_t k = sigma.size() - 1; k-- > 0;) {
    v[k] = v[k + 1] + 0.5 * h * (sigma[k] * sigma[k] + sigma[k + 1] * sigma[k + 1]);
  }
  return v;
}

double call_price(double S, double K, double r, double tau, double v) {
  check_call_inputs(S, K, tau, v);
  const double discounted_strike = K * std::exp(-r * tau);
  if (K == 0.0) return S;
  if (v == 0.0) return std::max(S - discounted_strike, 0.0);
  const double sd = std::sqrt(v);
  const double d1 = (std::log(S / discounted_strike) + 0.5 * v) / sd;
  return S * normal_cdf(d1) - discounted_strike * normal_cdf(d1 - sd);
}

double call_delta(double S, double K, double r, double tau, double v) {
  check_call_inputs(S, K, tau, v);
  if (K == 0.0) return 1.0;
  const double discounted_strike = K * std::exp(-r * tau);
  if (v == 0.0) return S > discounted_strike ? 1.0 : 0.0;
  const double sd = std::sqrt(v);
  return normal_cdf((std::log(S / discounted_strike) + 0.5 * v) / sd);
}

std::span<const double> horizon_view(std::span<const double> model_values, const GridSpec& grid) {
  if (model_values.size() != grid.model_count()) {
    throw std::invalid_argument("horizon_view: expected a model-domain array");
  }
  return model_values.subspan(grid.lookback_steps(), grid.horizon_steps() + 1);
}

std::span<const double> horizon_increments(const BrownianIncrements& bw) {
  return std::span<const double>(bw.dw).subspan(bw.grid.lookback_steps(), bw.grid.horizon_steps());
}

RebalanceSchedule parse_schedule(std::string_view name) {
  if (name == "uniform") return RebalanceSchedule::Uniform;
  if (name == "variance") return RebalanceSchedule::Variance;
  throw std::invalid_argument("unknown rebalance schedule '" + std::string(name) + "'");
}

std::vector<std::size_t> rebalance_nodes(std::span<const double> remaining_var,
                                         std::size_t n_rebalance, RebalanceSchedule schedule) {
  if (remaining_var.size() < 2) throw std::invalid_argument("rebalance_nodes: empty trading window");
  const std::size_t steps = remaining_var.size() - 1;
  if (n_rebalance == 0 || n_rebalance > steps) {
    throw std::invalid_argument("rebalance_nodes: need 1 <= n_rebalance <= horizon steps");
  }
  std::vector<std::size_t> nodes(n_rebalance);
  if (schedule == RebalanceSchedule::Uniform) {
    if (steps % n_rebalance != 0) {
      throw std::invalid_argument("rebalance_nodes: n_rebalance must divide the horizon step count");
    }
    for (std::size_t j = 0; j < n_rebalance; ++j) nodes[j] = j * (steps / n_rebalance);
    return nodes;
  }
  const double total = remaining_var.front();
  if (!(total > 0.0)) throw std::invalid_argument("rebalance_nodes: no variance left on [0, T]");
  // The slack keeps exact ties (constant volatility) on the uniform nodes.
  const double slack = 1e-12 * total;
  std::size_t m = 0;
  for (std::size_t j = 1; j < n_rebalance; ++j) {
    const double target = total * (1.0 - static_cast<double>(j) / static_cast<double>(n_rebalance));
    const std::size_t k = nodes[j - 1] + 1;
    m = std::max(m, k);
    while (m < steps && remaining_var[m] > target + slack) ++m;
    // Keep the nodes distinct and leave room for the ones still to come.
    nodes[j] = std::min(std::max(m, k), steps - (n_rebalance - j));
  }
  return nodes;
}

HedgeReport delta_hedge(const PricePath& S, std::span<const double> remaining_var,
                        const ClaimSpec& claim, double r, std::size_t n_rebalance,
                        RebalanceSchedule schedule) {
  const GridSpec& g = S.grid;
  const std::size_t steps = g.horizon_steps();
  if (remaining_var.size() != steps + 1) {
    throw std::invalid_argument("delta_hedge: remaining variance must cover [0, T]");
  }
  const std::vector<std::size_t> nodes = rebalance_nodes(remaining_var, n_rebalance, schedule);
  const std::size_t zero = g.lookback_steps();  // index of t = 0 in the price path
  const double T = g.horizon();

  HedgeReport rep;
  rep.n_rebalance = n_rebalance;
  rep.positions.reserve(n_rebalance);

  double wealth = 0.0;
  for (std::size_t j = 0; j < n_rebalance; ++j) {
    const std::size_t m = nodes[j];
    const double t = g.time(g.zero_index() + m);
    const double price = std::exp(S.R[zero + m]);
    const double bond = std::exp(r * t);
    if (j == 0) {
      wealth = call_price(price, claim.K, r, T - t, remaining_var[m]);
      rep.X0 = wealth;
    } else {
      const Position& held = rep.positions.back();
      wealth = held.beta * bond + held.gamma * price;
    }
    const double gamma = call_delta(price, claim.K, r, T - t, remaining_var[m]);
    rep.positions.push_back({t, price, bond, wealth, gamma, (wealth - gamma * price) / bond});
  }
  const Position& last = rep.positions.back();
  const double price_T = std::exp(S.R[zero + steps]);
  rep.terminal_wealth = last.beta * std::exp(r * T) + last.gamma * price_T;
  rep.payoff = claim.payoff(price_T);
  rep.terminal_error = rep.terminal_wealth - rep.payoff;
  return rep;
}

HedgeReport replicate_complete(const PricePath& S_eps, std::span<const double> sigma_eps,
                               const ClaimSpec& claim, double r, std::size_t n_rebalance,
                               RebalanceSchedule schedule) {
  for (double s : sigma_eps) {
    if (!(s > 0.0)) throw std::invalid_argument("replicate_complete: sigma_eps vanishes on [0, T]");
  }
  return delta_hedge(S_eps, remaining_variance(sigma_eps, S_eps.grid.h()), claim, r, n_rebalance,
                     schedule);
}

VolAssumption VolAssumption::scalar(double vol, const GridSpec& grid) {
  if (!(vol > 0.0)) throw std::invalid_argument("VolAssumption: vol must be positive");
  std::vector<double> sigma(grid.horizon_steps() + 1, vol);
  return {remaining_variance(sigma, grid.h())};
}

int regime_state(const RegimeSwitchLaw& law, double sigma) {
  return std::abs(sigma - law.sigma_levels[1]) < std::abs(sigma - law.sigma_levels[0]) ? 1 : 0;
}

VolAssumption expected_regime_variance(const RegimeSwitchLaw& law, int state_at_zero,
                                       const GridSpec& grid) {
  const double v0 = law.sigma_levels[0] * law.sigma_levels[0];
  const double v1 = law.sigma_levels[1] * law.sigma_levels[1];
  const double total = law.intensities[0] + law.intensities[1];
  const double stationary = total > 0.0 ? law.intensities[0] / total : 0.0;
  const double start = state_at_zero < 0 ? stationary : (state_at_zero == 1 ? 1.0 : 0.0);
  const double T = grid.horizon();
  std::vector<double> out(grid.horizon_steps() + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = grid.time(grid.zero_index() + k);
    // int_t^T P(state 1 at s | state at 0) ds
    double occupancy = start * (T - t);
    if (total > 0.0) {
      occupancy = stationary * (T - t) +
                  (start - stationary) * (std::exp(-total * t) - std::exp(-total * T)) / total;
    }
    out[k] = v0 * (T - t) + (v1 - v0) * occupancy;
  }
  out.back() = 0.0;
  return {std::move(out)};
}

HedgeReport hedge_incomplete(const PricePath& S, const ClaimSpec& claim, double r,
                             std::size_t n_rebalance, const VolAssumption& assumption,
                             RebalanceSchedule schedule) {
  return delta_hedge(S, assumption.remaining_var, claim, r, n_rebalance, schedule);
}

std::vector<double> market_price_of_risk(std::span<const double> a, std::span<const double> sigma,
                                         double r) {
  if (a.size() != sigma.size()) throw std::invalid_argument("market_price_of_risk: length mismatch");
  std::vector<double> theta(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(std::abs(sigma[k]) > 0.0)) throw std::invalid_argument("market_price_of_risk: vanishing sigma");
    theta[k] = (a[k] - r) / sigma[k];
  }
  return theta;
}

double girsanov_weight(std::span<const double> theta, std::span<const double> dw, double h) {
  if (theta.size() < dw.size()) throw std::invalid_argument("girsanov_weight: theta shorter than dw");
  double exponent = 0.0;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    exponent -= 0.5 * theta[k] * theta[k] * h + theta[k] * dw[k];
  }
  return std::exp(exponent);
}

}  // namespace mollify
