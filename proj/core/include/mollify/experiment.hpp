#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mollify/config.hpp"

namespace mollify {

enum class Subcommand { Simulate, Closeness, Forecast, Hedge, Distinguish, All };

/// Throws std::invalid_argument for anything else.
Subcommand parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand s);

struct ForecastRow {
  double epsilon = 0.0;
  int degree = 0;
  double lambda = 0.0;
  std::size_t seed = 0;  // path stream index
  double rel_error = 0.0;
};

struct HedgeRow {
  std::size_t path_id = 0;
  double X0 = 0.0;
  double payoff = 0.0;
  double terminal_error = 0.0;
  std::size_t n_rebalance = 0;
  std::string mode;
};

/// Relative L^2 prediction error of sigma_eps on [0, T] for every
/// (epsilon, degree, stream index), in that nesting order.
std::vector<ForecastRow> forecast_sweep(const ExperimentConfig& config);

/// Rows ordered by n_rebalance, then mode, then path.
std::vector<HedgeRow> hedge_batch(const ExperimentConfig& config);

struct RunOptions {
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

/// Loads and validates the configuration, runs the experiments selected by
/// `subcommand` and writes their CSV reports plus manifest.txt into the
/// output directory.  Returns 0 on success, 1 on a configuration error and
/// 2 on a runtime error; diagnostics go to `err`.
int run(std::string_view subcommand, const std::filesystem::path& config_path,
        const RunOptions& options, std::ostream& err);

/// Writes the reports for an already validated configuration.
void run_validated(Subcommand subcommand, const ExperimentConfig& config,
                   const std::filesystem::path& output_dir);

}  // namespace mollify
