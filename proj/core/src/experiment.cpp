#include "mollify/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "mollify/csv.hpp"
#include "mollify/distinguish.hpp"
#include "mollify/forecast.hpp"
#include "mollify/hedge.hpp"
#include "mollify/metrics.hpp"
#include "mollify/parallel.hpp"

namespace mollify {

Subcommand parse_subcommand(std::string_view name) {
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "closeness") return Subcommand::Closeness;
  if (name == "forecast") return Subcommand::Forecast;
  if (name == "hedge") return Subcommand::Hedge;
  if (name == "distinguish") return Subcommand::Distinguish;
  if (name == "all") return Subcommand::All;
  throw std::invalid_argument("unknown subcommand '" + std::string(name) + "'");
}

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Simulate: return "simulate";
    case Subcommand::Closeness: return "closeness";
    case Subcommand::Forecast: return "forecast";
    case Subcommand::Hedge: return "hedge";
    case Subcommand::Distinguish: return "distinguish";
    case Subcommand::All: return "all";
  }
  return "?";
}

std::vector<ForecastRow> forecast_sweep(const ExperimentConfig& c) {
  const GridSpec grid = c.grid_spec();
  const ModelSpec spec = c.model_spec();
  const FilterKind kind = c.sweep_kind();
  const std::size_t n_deg = c.forecast.degrees.size();
  const std::size_t n_seeds = c.forecast.n_seeds;

  std::vector<ForecastRow> rows;
  for (double eps : c.forecast.eps_list) {
    const FilterSpec f = FilterSpec::with_width(kind, eps);
    // One paired sample per stream index serves every degree.
    const auto per_seed = parallel_map<std::vector<double>>(n_seeds, [&](std::size_t s) {
      const PairedSample ps = paired_sample(spec, grid, f, c.seed, s);
      const auto truth = horizon_view(ps.mu_eps.model_sigma(), grid);
      std::vector<double> errors(n_deg);
      for (std::size_t d = 0; d < n_deg; ++d) {
        const Extrapolator e = fit_observation_window(
            ps.mu_eps, static_cast<int>(c.forecast.degrees[d]), c.forecast.lambda);
        errors[d] = prediction_error(predict_horizon(e, grid), truth, 2.0, grid.h());
      }
      return errors;
    });
    for (std::size_t d = 0; d < n_deg; ++d) {
      for (std::size_t s = 0; s < n_seeds; ++s) {
        rows.push_back({eps, static_cast<int>(c.forecast.degrees[d]), c.forecast.lambda, s,
                        per_seed[s][d]});
      }
    }
  }
  return rows;
}

namespace {

/// F_0-measurable volatility assumption for the original model.  "stationary"
/// uses the law alone; "conditional" also uses the volatility seen at t = 0.
VolAssumption incomplete_assumption(const ModelSpec& spec, const ParamPath& mu,
                                    const GridSpec& grid, bool conditional) {
  const double sigma0 = mu.model_sigma()[grid.lookback_steps()];
  if (const auto* law = std::get_if<RegimeSwitchLaw>(&spec.law)) {
    return expected_regime_variance(*law, conditional ? regime_state(*law, sigma0) : -1, grid);
  }
  if (const auto* law = std::get_if<ConstantLaw>(&spec.law)) return VolAssumption::scalar(law->sigma, grid);
  return VolAssumption::scalar(sigma0, grid);
}

}  // namespace

std::vector<HedgeRow> hedge_batch(const ExperimentConfig& c) {
  const GridSpec grid = c.grid_spec();
  const ModelSpec spec = c.model_spec();
  const FilterSpec f = FilterSpec::with_width(c.sweep_kind(), c.hedge.epsilon);
  const ClaimSpec claim{c.hedge.K};
  const RebalanceSchedule schedule = parse_schedule(c.hedge.schedule);
  const std::size_t n_paths = c.hedge.n_paths;
  const std::size_t n_cases = c.hedge.n_rebalance.size() * c.hedge.modes.size();

  auto per_path = parallel_map<std::vector<HedgeReport>>(n_paths, [&](std::size_t i) {
    const PairedSample ps = paired_sample(spec, grid, f, c.seed, i);
    const auto sigma_eps = horizon_view(ps.mu_eps.model_sigma(), grid);
    std::vector<double> forecast_var;
    std::optional<VolAssumption> assumption;
    std::vector<HedgeReport> out;
    out.reserve(n_cases);
    for (double nd : c.hedge.n_rebalance) {
      const auto n = static_cast<std::size_t>(nd);
      for (const std::string& mode : c.hedge.modes) {
        if (mode == "oracle") {
          out.push_back(replicate_complete(ps.price_eps, sigma_eps, claim, spec.r, n, schedule));
        } else if (mode == "forecast") {
          if (forecast_var.empty()) {
            const Extrapolator e = fit_observation_window(
                ps.mu_eps, static_cast<int>(c.forecast.degrees.at(0)), c.forecast.lambda);
            std::vector<double> sigma_hat = predict_horizon(e, grid);
            for (double& s : sigma_hat) s = std::clamp(s, spec.sigma_min, spec.sigma_max);
            forecast_var = remaining_variance(sigma_hat, grid.h());
          }
          out.push_back(delta_hedge(ps.price_eps, forecast_var, claim, spec.r, n, schedule));
        } else if (mode == "incomplete") {
          if (!assumption) {
            assumption = incomplete_assumption(spec, ps.mu, grid, c.hedge.assumption == "conditional");
          }
          out.push_back(hedge_incomplete(ps.price, claim, spec.r, n, *assumption, schedule));
        } else {
          throw std::invalid_argument("unknown hedge mode '" + mode + "'");
        }
        out.back().positions.clear();
      }
    }
    return out;
  });

  std::vector<HedgeRow> rows;
  rows.reserve(n_paths * n_cases);
  std::size_t case_index = 0;
  for (double nd : c.hedge.n_rebalance) {
    for (const std::string& mode : c.hedge.modes) {
      for (std::size_t i = 0; i < n_paths; ++i) {
        const HedgeReport& r = per_path[i][case_index];
        rows.push_back({i, r.X0, r.payoff, r.terminal_error, static_cast<std::size_t>(nd), mode});
      }
      ++case_index;
    }
  }
  return rows;
}

namespace {

void write_path(const std::filesystem::path& file, const PricePath& p) {
  CsvWriter w(file, {"t", "R", "S"});
  for (std::size_t k = 0; k < p.R.size(); ++k) {
    w.field(p.time_at(k)).field(p.R[k]).field(p.S(k));
    w.end_row();
  }
}

void run_simulate(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const PairedSample ps =
      paired_sample(c.model_spec(), c.grid_spec(), c.filter_spec(), c.seed, c.simulate_path_index);
  write_path(dir / "paths.csv", ps.price);
  write_path(dir / "paths_mollified.csv", ps.price_eps);
}

void run_closeness(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const auto reports = convergence_study(c.model_spec(), c.grid_spec(), c.sweep_kind(),
                                         c.metrics.eps_list, c.metrics.q, c.metrics.n_paths, c.seed);
  CsvWriter w(dir / "closeness.csv", {"epsilon", "q", "n_paths", "coeff_term", "coeff_se", "sup_term",
                                      "sup_se", "log_sup_term", "log_sup_se"});
  for (const ClosenessReport& r : reports) {
    w.field(r.epsilon).field(r.q).field(r.n_paths);
    w.field(r.coeff_term.mean).field(r.coeff_term.se);
    w.field(r.sup_term.mean).field(r.sup_term.se);
    w.field(r.log_sup_term.mean).field(r.log_sup_term.se);
    w.end_row();
  }
}

void run_forecast(const ExperimentConfig& c, const std::filesystem::path& dir) {
  CsvWriter w(dir / "forecast.csv", {"epsilon", "d", "lambda", "seed", "rel_error_q2"});
  for (const ForecastRow& r : forecast_sweep(c)) {
    w.field(r.epsilon).field(static_cast<std::size_t>(r.degree)).field(r.lambda).field(r.seed);
    w.field(r.rel_error);
    w.end_row();
  }
}

void run_hedge(const ExperimentConfig& c, const std::filesystem::path& dir) {
  CsvWriter w(dir / "hedge.csv", {"path_id", "X0", "payoff", "terminal_error", "n_rebalance", "mode"});
  for (const HedgeRow& r : hedge_batch(c)) {
    w.field(r.path_id).field(r.X0).field(r.payoff).field(r.terminal_error).field(r.n_rebalance);
    w.field(std::string_view(r.mode));
    w.end_row();
  }
}

void run_distinguish(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const GridSpec grid = c.grid_spec();
  const ModelSpec spec = c.model_spec();
  const DistinguishConfig& d = c.distinguish;
  const DistinguishSettings s{d.dt, d.tick, d.alpha, d.n_trials, d.n_paths_per_trial};
  // epsilon = 0 marks the same-model calibration row.
  const std::vector<PowerRow> rows =
      power_curve(spec, grid, c.sweep_kind(), d.eps_list, s, c.seed, d.null_calibration);
  CsvWriter w(dir / "power_curve.csv",
              {"epsilon", "dt", "tick", "n_trials", "rejection_rate", "ci_low", "ci_high"});
  for (const PowerRow& r : rows) {
    w.field(r.epsilon).field(d.dt).field(d.tick).field(r.result.n_trials);
    w.field(r.result.rate).field(r.result.ci_low).field(r.result.ci_high);
    w.end_row();
  }
}

void write_manifest(const std::filesystem::path& file, Subcommand sub, const ExperimentConfig& c,
                    double wall_seconds) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  // Metadata lines are comments, so the manifest itself loads as a config.
  out << "# mollify-markets " << MOLLIFY_VERSION << '\n';
  out << "# subcommand: " << to_string(sub) << '\n';
  out << "# seed: " << c.seed << '\n';
  out << "# wall_time_seconds: " << format_double(wall_seconds) << '\n';
  for (const auto& [key, value] : c.resolved()) out << key << " = " << value << '\n';
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace

void run_validated(Subcommand sub, const ExperimentConfig& c, const std::filesystem::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(dir);
  const bool all = sub == Subcommand::All;
  if (all || sub == Subcommand::Simulate) run_simulate(c, dir);
  if (all || sub == Subcommand::Closeness) run_closeness(c, dir);
  if (all || sub == Subcommand::Forecast) run_forecast(c, dir);
  if (all || sub == Subcommand::Hedge) run_hedge(c, dir);
  if (all || sub == Subcommand::Distinguish) run_distinguish(c, dir);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  write_manifest(dir / "manifest.txt", sub, c, wall.count());
}

int run(std::string_view subcommand, const std::filesystem::path& config_path,
        const RunOptions& options, std::ostream& err) {
  Subcommand sub{};
  ExperimentConfig config;
  try {
    sub = parse_subcommand(subcommand);
    config = load_config(config_path, options.overrides);
    if (options.seed) config.seed = *options.seed;
    if (options.output_dir) config.output_dir = options.output_dir->string();
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }
  const auto violations = validate(config);
  if (!violations.empty()) {
    for (const Violation& v : violations) err << "config error: " << v.key << ": " << v.message << '\n';
    return 1;
  }
  try {
    run_validated(sub, config, config.output_dir);
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace mollify
