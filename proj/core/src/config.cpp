#include "mollify/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "mollify/csv.hpp"

namespace mollify {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_plain_double(std::string_view s, const std::string& key) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(key, "expected a number, got '" + std::string(s) + "'");
  }
  return x;
}

/// Accepts plain decimals and fractions "p/q" (handy for 1/252).
double parse_double(std::string_view s, const std::string& key) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain_double(s, key);
  const double num = parse_plain_double(trim(s.substr(0, slash)), key);
  const double den = parse_plain_double(trim(s.substr(slash + 1)), key);
  if (den == 0.0) throw ConfigError(key, "division by zero");
  return num / den;
}

template <class Int>
Int parse_int(std::string_view s, const std::string& key) {
  s = trim(s);
  Int x{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(s) + "'");
  }
  return x;
}

bool parse_bool(std::string_view s, const std::string& key) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(s) + "'");
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, std::string_view, const std::string&)> parse;
  std::function<std::string(const ExperimentConfig&)> format;
};

template <class Access>
Field number(std::string key, Access access) {
  return {std::move(key),
          [access](ExperimentConfig& c, std::string_view v, const std::string& k) {
            access(c) = parse_double(v, k);
          },
          [access](const ExperimentConfig& c) { return format_double(access(c)); }};
}

template <class Int, class Access>
Field integer(std::string key, Access access) {
  return {std::move(key),
          [access](ExperimentConfig& c, std::string_view v, const std::string& k) {
            access(c) = parse_int<Int>(v, k);
          },
          [access](const ExperimentConfig& c) { return std::to_string(access(c)); }};
}

template <class Access>
Field text(std::string key, Access access) {
  return {std::move(key),
          [access](ExperimentConfig& c, std::string_view v, const std::string&) {
            access(c) = std::string(trim(v));
          },
          [access](const ExperimentConfig& c) { return access(c); }};
}

template <class Access>
Field number_list(std::string key, Access access) {
  return {std::move(key),
          [access](ExperimentConfig& c, std::string_view v, const std::string& k) {
            std::vector<double> xs;
            for (auto item : split_list(v)) xs.push_back(parse_double(item, k));
            access(c) = std::move(xs);
          },
          [access](const ExperimentConfig& c) { return join(access(c)); }};
}

template <class Access>
Field text_list(std::string key, Access access) {
  return {std::move(key),
          [access](ExperimentConfig& c, std::string_view v, const std::string&) {
            std::vector<std::string> xs;
            for (auto item : split_list(v)) xs.emplace_back(item);
            access(c) = std::move(xs);
          },
          [access](const ExperimentConfig& c) { return join(access(c)); }};
}

template <class Access>
Field boolean(std::string key, Access access) {
  return {std::move(key),
          [access](ExperimentConfig& c, std::string_view v, const std::string& k) {
            access(c) = parse_bool(v, k);
          },
          [access](const ExperimentConfig& c) { return std::string(access(c) ? "true" : "false"); }};
}

#define MM_FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      number("grid.delta", MM_FIELD(grid.delta)),
      number("grid.T", MM_FIELD(grid.T)),
      number("grid.delta0", MM_FIELD(grid.delta0)),
      number("grid.h", MM_FIELD(grid.h)),

      text("model.kind", MM_FIELD(model.kind)),
      number("model.r", MM_FIELD(model.r)),
      number("model.S0", MM_FIELD(model.S0)),
      number("model.sigma_min", MM_FIELD(model.sigma_min)),
      number("model.sigma_max", MM_FIELD(model.sigma_max)),
      number("model.a_max", MM_FIELD(model.a_max)),
      number("model.a", MM_FIELD(model.a)),
      number("model.sigma", MM_FIELD(model.sigma)),
      number_list("model.regime.levels", MM_FIELD(model.regime_levels)),
      number_list("model.regime.a_levels", MM_FIELD(model.regime_a_levels)),
      number_list("model.regime.intensities", MM_FIELD(model.regime_intensities)),
      integer<int>("model.regime.initial_state", MM_FIELD(model.regime_initial_state)),
      number("model.factor.kappa", MM_FIELD(model.factor_kappa)),
      number("model.factor.mean", MM_FIELD(model.factor_mean)),
      number("model.factor.vol", MM_FIELD(model.factor_vol)),
      text("model.closed_loop.map", MM_FIELD(model.closed_loop_map)),
      text("model.closed_loop.driver", MM_FIELD(model.closed_loop_driver)),
      number("model.closed_loop.base", MM_FIELD(model.closed_loop_base)),
      number("model.closed_loop.amplitude", MM_FIELD(model.closed_loop_amplitude)),
      number("model.closed_loop.rho0", MM_FIELD(model.closed_loop_rho0)),

      text("filter.kind", MM_FIELD(filter_kind)),
      number("filter.epsilon", MM_FIELD(filter_epsilon)),
      number("filter.cutoff", MM_FIELD(filter_cutoff)),
      number("filter.decay", MM_FIELD(filter_decay)),
      number("filter.truncation_radius", MM_FIELD(filter_truncation_radius)),

      number("metrics.q", MM_FIELD(metrics.q)),
      number_list("metrics.eps_list", MM_FIELD(metrics.eps_list)),
      integer<std::size_t>("metrics.n_paths", MM_FIELD(metrics.n_paths)),

      number_list("forecast.degrees", MM_FIELD(forecast.degrees)),
      number("forecast.lambda", MM_FIELD(forecast.lambda)),
      number_list("forecast.eps_list", MM_FIELD(forecast.eps_list)),
      integer<std::size_t>("forecast.n_seeds", MM_FIELD(forecast.n_seeds)),

      number("hedge.K", MM_FIELD(hedge.K)),
      number_list("hedge.n_rebalance", MM_FIELD(hedge.n_rebalance)),
      text_list("hedge.modes", MM_FIELD(hedge.modes)),
      number("hedge.epsilon", MM_FIELD(hedge.epsilon)),
      text("hedge.assumption", MM_FIELD(hedge.assumption)),
      text("hedge.schedule", MM_FIELD(hedge.schedule)),
      integer<std::size_t>("hedge.n_paths", MM_FIELD(hedge.n_paths)),

      number("distinguish.dt", MM_FIELD(distinguish.dt)),
      number("distinguish.tick", MM_FIELD(distinguish.tick)),
      number("distinguish.alpha", MM_FIELD(distinguish.alpha)),
      integer<std::size_t>("distinguish.n_trials", MM_FIELD(distinguish.n_trials)),
      integer<std::size_t>("distinguish.n_paths_per_trial", MM_FIELD(distinguish.n_paths_per_trial)),
      number_list("distinguish.eps_list", MM_FIELD(distinguish.eps_list)),
      boolean("distinguish.null_calibration", MM_FIELD(distinguish.null_calibration)),

      integer<std::size_t>("simulate.path_index", MM_FIELD(simulate_path_index)),
      integer<std::uint64_t>("seed", MM_FIELD(seed)),
      text("output.dir", MM_FIELD(output_dir)),
  };
  return table;
}

#undef MM_FIELD

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError(key, "duplicate key (line " + std::to_string(line_no) + ")");
    }
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.parse(*this, value, f.key);
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

void ExperimentConfig::apply(const KeyValues& kv) {
  for (const auto& [key, value] : kv) set(key, value);
}

KeyValues ExperimentConfig::resolved() const {
  KeyValues out;
  for (const Field& f : fields()) out.emplace(f.key, f.format(*this));
  return out;
}

GridSpec ExperimentConfig::grid_spec() const {
  return GridSpec::make(grid.delta, grid.T, grid.delta0, grid.h);
}

namespace {

ExogenousLaw make_law(const ModelConfig& m, std::string_view kind) {
  if (kind == "constant") return ConstantLaw{m.a, m.sigma};
  if (kind == "regime") {
    RegimeSwitchLaw law;
    law.sigma_levels = {m.regime_levels.at(0), m.regime_levels.at(1)};
    law.a_levels = m.regime_a_levels.empty()
                       ? std::array<double, 2>{m.a, m.a}
                       : std::array<double, 2>{m.regime_a_levels.at(0), m.regime_a_levels.at(1)};
    law.intensities = {m.regime_intensities.at(0), m.regime_intensities.at(1)};
    law.initial_state = m.regime_initial_state;
    return law;
  }
  if (kind == "factor") return FactorVolLaw{m.a, m.factor_kappa, m.factor_mean, m.factor_vol};
  throw ConfigError("model.kind", "unknown model kind '" + std::string(kind) + "'");
}

}  // namespace

ModelSpec ExperimentConfig::model_spec() const {
  ModelSpec spec;
  spec.r = model.r;
  spec.S0 = model.S0;
  spec.sigma_min = model.sigma_min;
  spec.sigma_max = model.sigma_max;
  spec.a_max = model.a_max;
  if (model.kind == "closed-loop") {
    ClosedLoopLaw law;
    law.driver = make_law(model, model.closed_loop_driver);
    law.map = {parse_map_id(model.closed_loop_map), model.a, model.closed_loop_base,
               model.closed_loop_amplitude, model.closed_loop_rho0};
    spec.law = law;
  } else {
    std::visit([&](const auto& l) { spec.law = l; }, make_law(model, model.kind));
  }
  return spec;
}

FilterSpec ExperimentConfig::filter_spec() const {
  return {parse_filter_kind(filter_kind), filter_epsilon, filter_cutoff, filter_decay,
          filter_truncation_radius};
}

FilterKind ExperimentConfig::sweep_kind() const { return parse_filter_kind(filter_kind); }

std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> out;
  auto fail = [&](std::string key, std::string msg) { out.push_back({std::move(key), std::move(msg)}); };

  // Grid.
  const double h = c.grid.h;
  bool grid_ok = h > 0.0 && std::isfinite(h);
  if (!grid_ok) fail("grid.h", "must be positive");
  const std::pair<const char*, double> lengths[] = {
      {"grid.delta", c.grid.delta}, {"grid.T", c.grid.T}, {"grid.delta0", c.grid.delta0}};
  for (const auto& [key, len] : lengths) {
    std::size_t steps = 0;
    if (!(len > 0.0)) {
      fail(key, "must be positive");
      grid_ok = false;
    } else if (grid_ok && (!is_multiple_of(len, h, &steps) || steps == 0)) {
      fail(key, "must be an integer multiple of grid.h");
      grid_ok = false;
    }
  }
  std::size_t horizon_steps = 0, lookback_steps = 0;
  if (grid_ok) {
    is_multiple_of(c.grid.T, h, &horizon_steps);
    is_multiple_of(c.grid.delta, h, &lookback_steps);
  }

  // Model.
  const ModelConfig& m = c.model;
  const bool closed_loop = m.kind == "closed-loop";
  const std::string law_kind = closed_loop ? m.closed_loop_driver : m.kind;
  if (m.kind != "constant" && m.kind != "regime" && m.kind != "factor" && !closed_loop) {
    fail("model.kind", "must be one of constant, regime, factor, closed-loop");
  }
  if (closed_loop && law_kind != "constant" && law_kind != "regime" && law_kind != "factor") {
    fail("model.closed_loop.driver", "must be one of constant, regime, factor");
  }
  if (closed_loop) {
    try {
      parse_map_id(m.closed_loop_map);
    } catch (const std::invalid_argument&) {
      fail("model.closed_loop.map", "unknown map (catalog: constant, clamped-linear, factor-feedback)");
    }
  }
  if (!(m.S0 > 0.0)) fail("model.S0", "must be positive");
  if (!std::isfinite(m.r)) fail("model.r", "must be finite");
  const bool sigma_min_ok = m.sigma_min > 0.0 && std::isfinite(m.sigma_min);
  if (!sigma_min_ok) fail("model.sigma_min", "must be positive");
  if (!(m.sigma_max >= m.sigma_min) || !std::isfinite(m.sigma_max)) {
    fail("model.sigma_max", "must be finite and >= model.sigma_min");
  }
  if (!(m.a_max >= 0.0)) fail("model.a_max", "must be >= 0");
  auto in_bounds = [&](double s) { return !sigma_min_ok || (s >= m.sigma_min && s <= m.sigma_max); };
  if (std::abs(m.a) > m.a_max) fail("model.a", "exceeds model.a_max");
  if (law_kind == "constant" && (!(m.sigma > 0.0) || !in_bounds(m.sigma))) {
    fail("model.sigma", "must lie in [model.sigma_min, model.sigma_max]");
  }
  if (law_kind == "regime") {
    if (m.regime_levels.size() != 2) {
      fail("model.regime.levels", "needs exactly two levels");
    } else if (!in_bounds(m.regime_levels[0]) || !in_bounds(m.regime_levels[1])) {
      fail("model.regime.levels", "must lie in [model.sigma_min, model.sigma_max]");
    }
    if (m.regime_intensities.size() != 2 || !(m.regime_intensities[0] >= 0.0) ||
        !(m.regime_intensities[1] >= 0.0)) {
      fail("model.regime.intensities", "needs two intensities >= 0");
    }
    if (!m.regime_a_levels.empty() &&
        (m.regime_a_levels.size() != 2 || std::abs(m.regime_a_levels[0]) > m.a_max ||
         std::abs(m.regime_a_levels[1]) > m.a_max)) {
      fail("model.regime.a_levels", "needs two values with |a| <= model.a_max");
    }
    if (m.regime_initial_state < -1 || m.regime_initial_state > 1) {
      fail("model.regime.initial_state", "must be -1 (stationary), 0 or 1");
    }
  }
  if (law_kind == "factor") {
    if (!(m.factor_kappa > 0.0)) fail("model.factor.kappa", "must be positive");
    if (!(m.factor_vol >= 0.0)) fail("model.factor.vol", "must be >= 0");
  }

  // Filter family and bandwidth lists.
  bool filter_ok = true;
  try {
    parse_filter_kind(c.filter_kind);
  } catch (const std::invalid_argument&) {
    fail("filter.kind", "must be one of gaussian, ideal-lowpass, exp-decay");
    filter_ok = false;
  }
  if (!(c.filter_truncation_radius > 0.0)) fail("filter.truncation_radius", "must be positive");
  const bool gaussian = filter_ok && parse_filter_kind(c.filter_kind) == FilterKind::Gaussian;
  auto check_width = [&](const std::string& key, double eps) {
    if (!(eps > 0.0)) {
      fail(key, "bandwidth must be positive");
      return;
    }
    if (!grid_ok) return;
    if (eps < 2.0 * h * (1.0 - 1e-12)) {
      fail(key, "bandwidth " + format_double(eps) + " is below the resolvability floor 2h = " +
                    format_double(2.0 * h));
    } else if (gaussian && c.filter_truncation_radius * eps > c.grid.delta0 * (1.0 + 1e-12)) {
      fail(key, "kernel support " + format_double(c.filter_truncation_radius * eps) +
                    " exceeds grid.delta0");
    }
  };
  auto check_list = [&](const std::string& key, const std::vector<double>& xs, bool decreasing) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (decreasing && i > 0 && !(xs[i] < xs[i - 1])) fail(key, "must be strictly decreasing");
      check_width(key, xs[i]);
    }
  };
  if (gaussian) check_width("filter.epsilon", c.filter_epsilon);
  if (filter_ok && parse_filter_kind(c.filter_kind) == FilterKind::IdealLowPass && !(c.filter_cutoff > 0.0)) {
    fail("filter.cutoff", "must be positive");
  }
  if (filter_ok && parse_filter_kind(c.filter_kind) == FilterKind::ExpDecay && !(c.filter_decay > 0.0)) {
    fail("filter.decay", "must be positive");
  }

  // Metrics.
  if (!(c.metrics.q >= 1.0)) fail("metrics.q", "must be >= 1");
  if (c.metrics.n_paths == 0) fail("metrics.n_paths", "must be positive");
  check_list("metrics.eps_list", c.metrics.eps_list, true);

  // Forecast.
  for (double d : c.forecast.degrees) {
    if (!(d >= 0.0) || d != std::floor(d)) {
      fail("forecast.degrees", "must be non-negative integers");
    } else if (grid_ok && lookback_steps + 1 < static_cast<std::size_t>(d) + 1) {
      fail("forecast.degrees", "needs at least degree + 1 nodes on [-delta, 0]");
    }
  }
  if (!(c.forecast.lambda >= 0.0)) fail("forecast.lambda", "must be >= 0");
  if (c.forecast.n_seeds == 0) fail("forecast.n_seeds", "must be positive");
  check_list("forecast.eps_list", c.forecast.eps_list, false);

  // Hedge.
  if (!(c.hedge.K >= 0.0)) fail("hedge.K", "must be >= 0");
  if (c.hedge.n_paths == 0) fail("hedge.n_paths", "must be positive");
  for (double n : c.hedge.n_rebalance) {
    if (!(n >= 1.0) || n != std::floor(n)) {
      fail("hedge.n_rebalance", "must be positive integers");
    } else if (grid_ok && static_cast<std::size_t>(n) > horizon_steps) {
      fail("hedge.n_rebalance", format_double(n) + " exceeds the " + std::to_string(horizon_steps) +
                                    " horizon steps");
    } else if (grid_ok && c.hedge.schedule == "uniform" &&
               horizon_steps % static_cast<std::size_t>(n) != 0) {
      fail("hedge.n_rebalance", format_double(n) + " does not divide the " +
                                    std::to_string(horizon_steps) + " horizon steps");
    }
  }
  for (const std::string& mode : c.hedge.modes) {
    if (mode != "oracle" && mode != "forecast" && mode != "incomplete") {
      fail("hedge.modes", "unknown mode '" + mode + "' (oracle, forecast, incomplete)");
    }
  }
  check_width("hedge.epsilon", c.hedge.epsilon);
  if (c.hedge.assumption != "stationary" && c.hedge.assumption != "conditional") {
    fail("hedge.assumption", "must be stationary or conditional");
  }
  if (c.hedge.schedule != "uniform" && c.hedge.schedule != "variance") {
    fail("hedge.schedule", "must be uniform or variance");
  }

  // Distinguish.
  const DistinguishConfig& d = c.distinguish;
  std::size_t stride = 0;
  if (!(d.dt > 0.0)) {
    fail("distinguish.dt", "must be positive");
  } else if (grid_ok && (!is_multiple_of(d.dt, h, &stride) || stride == 0)) {
    fail("distinguish.dt", "divisibility: must be an integer multiple of grid.h");
  } else if (grid_ok && lookback_steps % stride != 0) {
    fail("distinguish.dt", "divisibility: must divide the observation window grid.delta");
  }
  if (!(d.tick > 0.0)) fail("distinguish.tick", "must be positive");
  if (!(d.alpha > 0.0 && d.alpha < 1.0)) fail("distinguish.alpha", "must lie in (0, 1)");
  if (d.n_trials < 100) fail("distinguish.n_trials", "must be >= 100");
  if (d.n_paths_per_trial == 0) fail("distinguish.n_paths_per_trial", "must be positive");
  check_list("distinguish.eps_list", d.eps_list, false);

  if (c.output_dir.empty()) fail("output.dir", "must not be empty");
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  config.apply(read_key_values(path));
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("", "--set expects key=value, got '" + o + "'");
    config.set(trim(std::string_view(o).substr(0, eq)), std::string_view(o).substr(eq + 1));
  }
  return config;
}

}  // namespace mollify
