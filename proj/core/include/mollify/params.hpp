#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mollify/grid.hpp"

namespace mollify {

// ---------------------------------------------------------------------------
// Coefficient laws.  Every law produces (a(t), sigma(t)) that is independent
// of the Brownian driver, except ClosedLoopLaw whose sigma is resolved inside
// the SDE step from the current log price.
// ---------------------------------------------------------------------------

struct ConstantLaw {
  double a = 0.05;
  double sigma = 0.2;
};

/// Two-state continuous-time Markov chain; state s has volatility
/// sigma_levels[s] and appreciation a_levels[s].  intensities[0] is the rate
/// of leaving state 0, intensities[1] the rate of leaving state 1.
struct RegimeSwitchLaw {
  std::array<double, 2> sigma_levels{0.1, 0.3};
  std::array<double, 2> a_levels{0.05, 0.05};
  std::array<double, 2> intensities{2.0, 2.0};
  /// -1 draws the starting state from the stationary distribution.
  int initial_state = -1;
};

/// Ornstein-Uhlenbeck factor y with sigma = sigma_min + (sigma_max -
/// sigma_min) * logistic(y).  The factor starts from its stationary law.
struct FactorVolLaw {
  double a = 0.05;
  double kappa = 4.0;
  double mean = 0.0;
  double vol = 1.0;
};

using ExogenousLaw = std::variant<ConstantLaw, RegimeSwitchLaw, FactorVolLaw>;

enum class ClosedLoopMapId {
  Constant,        // (a, base)
  ClampedLinear,   // (a, clamp(base + amplitude * tanh(rho - rho0)))
  FactorFeedback,  // (a, clamp(y + amplitude * tanh(rho - rho0)))
};

ClosedLoopMapId parse_map_id(std::string_view name);
std::string_view to_string(ClosedLoopMapId id);

struct ClosedLoopMap {
  ClosedLoopMapId id = ClosedLoopMapId::ClampedLinear;
  double a = 0.05;
  double base = 0.2;
  double amplitude = 0.05;
  double rho0 = 4.605170185988092;  // log(100)

  /// Lipschitz constant of sigma in the log-price argument.
  double lipschitz_constant() const;
};

/// Closed-loop model: the exogenous driver supplies y(t) (its sigma path) and
/// the catalog map turns (y, R, t) into coefficients.
struct ClosedLoopLaw {
  ExogenousLaw driver = RegimeSwitchLaw{};
  ClosedLoopMap map{};
};

enum class ModelKind { ConstantParams, MarkovRegimeSwitch, FactorVol, ClosedLoop };

struct ModelSpec {
  std::variant<ConstantLaw, RegimeSwitchLaw, FactorVolLaw, ClosedLoopLaw> law =
      RegimeSwitchLaw{};
  double r = 0.05;
  double S0 = 100.0;
  double sigma_min = 0.05;
  double sigma_max = 0.6;
  double a_max = 1.0;

  ModelKind kind() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Coefficients {
  double a;
  double sigma;
};

/// Evaluates the closed-loop catalog map of `spec` (which must be ClosedLoop).
/// sigma is clamped into [sigma_min, sigma_max].
Coefficients closed_loop_sigma(const ModelSpec& spec, double y, double rho,
                               double t);

// ---------------------------------------------------------------------------
// Sampled coefficient trajectories.
// ---------------------------------------------------------------------------

enum class PathDomain {
  Model,     // nodes of [-delta, T]
  Extended,  // every grid node of [-delta - delta0, T + delta0]
};

struct ParamPath {
  GridSpec grid;
  PathDomain domain = PathDomain::Model;
  std::vector<double> a;
  std::vector<double> sigma;
  /// Closed-loop driver values; empty for the other kinds.
  std::vector<double> y;

  /// Grid node of element 0.
  std::size_t first_node() const {
    return domain == PathDomain::Model ? grid.lookback_begin() : 0;
  }
  std::size_t size() const { return sigma.size(); }
  double time_at(std::size_t k) const;

  std::span<const double> model_a() const { return model_view(a); }
  std::span<const double> model_sigma() const { return model_view(sigma); }
  std::span<const double> model_y() const { return model_view(y); }

 private:
  std::span<const double> model_view(const std::vector<double>& v) const;
};

/// Samples the exogenous coefficients on [-delta, T] from the stream
/// (seed, Coefficient, path_index).  Rejects ClosedLoop specs.
ParamPath sample_exogenous(const ModelSpec& spec, const GridSpec& grid,
                           std::uint64_t seed, std::uint64_t path_index = 0);

/// Samples the driver of a ClosedLoop spec; the returned path carries the
/// driver's sigma path in `y` (and in `sigma`, for reference).
ParamPath sample_driver(const ModelSpec& spec, const GridSpec& grid,
                        std::uint64_t seed, std::uint64_t path_index = 0);

/// Same, for a bare law with explicit bounds.
ParamPath sample_law(const ExogenousLaw& law, double sigma_min, double sigma_max,
                     const GridSpec& grid, std::uint64_t seed,
                     std::uint64_t path_index = 0);

/// Extends a model-domain path to the whole grid: a = 0 off [-delta, T];
/// sigma (and y) = 1 on the flanks [-delta - delta0, -delta) and
/// (T, T + delta0].  Values beyond the grid are implicitly zero.
ParamPath extend_boundary(const ParamPath& path, const GridSpec& grid);

}  // namespace mollify
