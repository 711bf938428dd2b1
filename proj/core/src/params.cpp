#include "mollify/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mollify/rng.hpp"

namespace mollify {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

void validate_law(const ExogenousLaw& law, const ModelSpec& spec,
                  const std::string& prefix) {
  std::visit(
      Overloaded{
          [&](const ConstantLaw& c) {
            require(finite_all({c.a, c.sigma}), prefix + "constant: non-finite value");
            require(c.sigma >= spec.sigma_min && c.sigma <= spec.sigma_max,
                    prefix + "sigma outside [sigma_min, sigma_max]");
            require(std::abs(c.a) <= spec.a_max, prefix + "a exceeds a_max");
          },
          [&](const RegimeSwitchLaw& rs) {
            for (int s = 0; s < 2; ++s) {
              require(rs.sigma_levels[s] >= spec.sigma_min &&
                          rs.sigma_levels[s] <= spec.sigma_max,
                      prefix + "regime.levels outside [sigma_min, sigma_max]");
              require(std::abs(rs.a_levels[s]) <= spec.a_max,
                      prefix + "regime.a_levels exceed a_max");
              require(rs.intensities[s] >= 0.0 && std::isfinite(rs.intensities[s]),
                      prefix + "regime.intensities must be finite and >= 0");
            }
            require(rs.initial_state >= -1 && rs.initial_state <= 1,
                    prefix + "regime.initial_state must be -1, 0 or 1");
          },
          [&](const FactorVolLaw& f) {
            require(finite_all({f.a, f.kappa, f.mean, f.vol}),
                    prefix + "factor: non-finite value");
            require(f.kappa > 0.0, prefix + "factor.kappa must be positive");
            require(f.vol >= 0.0, prefix + "factor.vol must be >= 0");
            require(std::abs(f.a) <= spec.a_max, prefix + "a exceeds a_max");
          },
      },
      law);
}

double clamp_sigma(double s, double lo, double hi) { return std::clamp(s, lo, hi); }

}  // namespace

ClosedLoopMapId parse_map_id(std::string_view name) {
  if (name == "constant") return ClosedLoopMapId::Constant;
  if (name == "clamped-linear") return ClosedLoopMapId::ClampedLinear;
  if (name == "factor-feedback") return ClosedLoopMapId::FactorFeedback;
  throw std::invalid_argument("unknown closed-loop map '" + std::string(name) + "'");
}

std::string_view to_string(ClosedLoopMapId id) {
  switch (id) {
    case ClosedLoopMapId::Constant: return "constant";
    case ClosedLoopMapId::ClampedLinear: return "clamped-linear";
    case ClosedLoopMapId::FactorFeedback: return "factor-feedback";
  }
  return "?";
}

double ClosedLoopMap::lipschitz_constant() const {
  // tanh is 1-Lipschitz and clamping does not increase the constant.
  return id == ClosedLoopMapId::Constant ? 0.0 : std::abs(amplitude);
}

ModelKind ModelSpec::kind() const {
  return std::visit(Overloaded{
                        [](const ConstantLaw&) { return ModelKind::ConstantParams; },
                        [](const RegimeSwitchLaw&) { return ModelKind::MarkovRegimeSwitch; },
                        [](const FactorVolLaw&) { return ModelKind::FactorVol; },
                        [](const ClosedLoopLaw&) { return ModelKind::ClosedLoop; },
                    },
                    law);
}

void ModelSpec::validate() const {
  require(finite_all({r, S0, sigma_min, sigma_max, a_max}), "model: non-finite value");
  require(sigma_min > 0.0, "model.sigma_min must be positive");
  require(sigma_min <= sigma_max, "model.sigma_min must not exceed model.sigma_max");
  require(S0 > 0.0, "model.S0 must be positive");
  require(a_max >= 0.0, "model.a_max must be >= 0");
  std::visit(Overloaded{
                 [&](const ClosedLoopLaw& cl) {
                   validate_law(cl.driver, *this, "model.closed_loop.driver.");
                   require(finite_all({cl.map.a, cl.map.base, cl.map.amplitude, cl.map.rho0}),
                           "model.closed_loop: non-finite map parameter");
                   require(std::abs(cl.map.a) <= a_max, "model.closed_loop.a exceeds a_max");
                 },
                 [&](const auto& law_alt) { validate_law(ExogenousLaw{law_alt}, *this, "model."); },
             },
             law);
}

Coefficients closed_loop_sigma(const ModelSpec& spec, double y, double rho, double t) {
  const auto* cl = std::get_if<ClosedLoopLaw>(&spec.law);
  if (cl == nullptr) throw std::invalid_argument("closed_loop_sigma: spec is not ClosedLoop");
  if (!finite_all({y, rho, t})) throw std::invalid_argument("closed_loop_sigma: non-finite input");
  const ClosedLoopMap& m = cl->map;
  double sigma = 0.0;
  switch (m.id) {
    case ClosedLoopMapId::Constant:
      sigma = m.base;
      break;
    case ClosedLoopMapId::ClampedLinear:
      sigma = m.base + m.amplitude * std::tanh(rho - m.rho0);
      break;
    case ClosedLoopMapId::FactorFeedback:
      sigma = y + m.amplitude * std::tanh(rho - m.rho0);
      break;
  }
  return {m.a, clamp_sigma(sigma, spec.sigma_min, spec.sigma_max)};
}

double ParamPath::time_at(std::size_t k) const { return grid.time(first_node() + k); }

std::span<const double> ParamPath::model_view(const std::vector<double>& v) const {
  if (v.empty()) return {};
  std::span<const double> all(v);
  if (domain == PathDomain::Model) return all;
  return all.subspan(grid.lookback_begin(), grid.model_count());
}

ParamPath sample_law(const ExogenousLaw& law, double sigma_min, double sigma_max,
                     const GridSpec& grid, std::uint64_t seed, std::uint64_t path_index) {
  const std::size_t n = grid.model_count();
  ParamPath out{grid, PathDomain::Model, std::vector<double>(n), std::vector<double>(n), {}};
  CounterRng rng(seed, StreamTag::Coefficient, path_index);

  std::visit(
      Overloaded{
          [&](const ConstantLaw& c) {
            std::fill(out.a.begin(), out.a.end(), c.a);
            std::fill(out.sigma.begin(), out.sigma.end(), c.sigma);
          },
          [&](const RegimeSwitchLaw& rs) {
            int state = rs.initial_state;
            if (state < 0) {
              const double total = rs.intensities[0] + rs.intensities[1];
              // Stationary probability of state 1 is (rate 0->1) / total.
              const double p1 = total > 0.0 ? rs.intensities[0] / total : 0.0;
              state = rng.uniform() < p1 ? 1 : 0;
            }
            const double t0 = out.time_at(0);
            auto holding = [&](int s) {
              const double rate = rs.intensities[s];
              return rate > 0.0 ? rng.exponential(rate) : INFINITY;
            };
            double next_jump = t0 + holding(state);
            for (std::size_t k = 0; k < n; ++k) {
              const double t = out.time_at(k);
              while (next_jump <= t) {
                state = 1 - state;
                next_jump += holding(state);
              }
              out.sigma[k] = rs.sigma_levels[state];
              out.a[k] = rs.a_levels[state];
            }
          },
          [&](const FactorVolLaw& f) {
            const double h = grid.h();
            const double decay = std::exp(-f.kappa * h);
            const double step_sd = f.vol * std::sqrt((1.0 - decay * decay) / (2.0 * f.kappa));
            const double stationary_sd = f.vol / std::sqrt(2.0 * f.kappa);
            double y = f.mean + stationary_sd * rng.normal();
            const double span = sigma_max - sigma_min;
            for (std::size_t k = 0; k < n; ++k) {
              if (k > 0) y = f.mean + (y - f.mean) * decay + step_sd * rng.normal();
              out.sigma[k] = sigma_min + span / (1.0 + std::exp(-y));
              out.a[k] = f.a;
            }
          },
      },
      law);
  return out;
}

ParamPath sample_exogenous(const ModelSpec& spec, const GridSpec& grid, std::uint64_t seed,
                           std::uint64_t path_index) {
  spec.validate();
  return std::visit(
      Overloaded{
          [&](const ClosedLoopLaw&) -> ParamPath {
            throw std::invalid_argument(
                "sample_exogenous: ClosedLoop sigma is resolved inside the SDE step");
          },
          [&](const auto& law) {
            return sample_law(ExogenousLaw{law}, spec.sigma_min, spec.sigma_max, grid, seed,
                              path_index);
          },
      },
      spec.law);
}

ParamPath sample_driver(const ModelSpec& spec, const GridSpec& grid, std::uint64_t seed,
                        std::uint64_t path_index) {
  spec.validate();
  const auto* cl = std::get_if<ClosedLoopLaw>(&spec.law);
  if (cl == nullptr) throw std::invalid_argument("sample_driver: spec is not ClosedLoop");
  ParamPath out = sample_law(cl->driver, spec.sigma_min, spec.sigma_max, grid, seed, path_index);
  out.y = out.sigma;
  return out;
}

ParamPath extend_boundary(const ParamPath& path, const GridSpec& grid) {
  if (!(path.grid == grid)) throw std::invalid_argument("extend_boundary: grid mismatch");
  if (path.domain != PathDomain::Model || path.size() != grid.model_count()) {
    throw std::invalid_argument("extend_boundary: input must cover exactly [-delta, T]");
  }
  const std::size_t n = grid.node_count();
  const std::size_t lo = grid.lookback_begin();

  auto extend = [&](const std::vector<double>& model, double flank) {
    std::vector<double> out(n, flank);
    std::copy(model.begin(), model.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
    return out;
  };
  ParamPath out{grid, PathDomain::Extended, extend(path.a, 0.0), extend(path.sigma, 1.0), {}};
  if (!path.y.empty()) out.y = extend(path.y, 1.0);
  return out;
}

}  // namespace mollify
