#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mollify/filter.hpp"
#include "mollify/grid.hpp"
#include "mollify/params.hpp"

namespace mollify {

/// Raised for unreadable files, syntax errors, unknown keys and malformed
/// values.  `key()` is the dotted key path (empty for file-level errors).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat `key = value` file; `#` starts a comment, blank lines are ignored,
/// duplicate keys are an error.
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

struct GridConfig {
  double delta = 1.0;
  double T = 128.0 / 252.0;
  double delta0 = 4.0;
  double h = 1.0 / 4032.0;
};

struct ModelConfig {
  std::string kind = "regime";  // constant | regime | factor | closed-loop
  double r = 0.05;
  double S0 = 100.0;
  double sigma_min = 0.05;
  double sigma_max = 0.6;
  double a_max = 1.0;
  double a = 0.05;
  double sigma = 0.2;  // constant kind
  std::vector<double> regime_levels{0.1, 0.3};
  std::vector<double> regime_a_levels;  // empty: a in both states
  std::vector<double> regime_intensities{2.0, 2.0};
  int regime_initial_state = -1;
  double factor_kappa = 4.0;
  double factor_mean = 0.0;
  double factor_vol = 1.0;
  std::string closed_loop_map = "factor-feedback";
  std::string closed_loop_driver = "regime";  // constant | regime | factor
  double closed_loop_base = 0.2;
  double closed_loop_amplitude = 0.05;
  double closed_loop_rho0 = 4.605170185988092;
};

struct MetricsConfig {
  double q = 2.0;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::size_t n_paths = 256;
};

struct ForecastConfig {
  std::vector<double> degrees{8};
  double lambda = 1e-6;
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  std::size_t n_seeds = 32;
};

struct HedgeConfig {
  double K = 100.0;
  std::vector<double> n_rebalance{64, 256};
  std::vector<std::string> modes{"oracle", "forecast", "incomplete"};
  double epsilon = 0.05;
  std::size_t n_paths = 256;
  std::string assumption = "stationary";  // stationary | conditional
  std::string schedule = "variance";      // uniform | variance
};

struct DistinguishConfig {
  double dt = 1.0 / 252.0;
  double tick = 1e-4;
  double alpha = 0.05;
  std::size_t n_trials = 200;
  std::size_t n_paths_per_trial = 64;
  std::vector<double> eps_list{0.5, 0.2, 0.05, 0.01};
  bool null_calibration = true;
};

struct ExperimentConfig {
  GridConfig grid;
  ModelConfig model;
  std::string filter_kind = "gaussian";
  double filter_epsilon = 0.05;
  double filter_cutoff = 20.0;
  double filter_decay = 0.05;
  double filter_truncation_radius = 8.0;
  MetricsConfig metrics;
  ForecastConfig forecast;
  HedgeConfig hedge;
  DistinguishConfig distinguish;
  std::size_t simulate_path_index = 0;
  std::uint64_t seed = 20130101;
  std::string output_dir = "out";

  /// Applies key/value pairs on top of the current values.  Throws
  /// ConfigError for unknown keys or unparsable values.
  void apply(const KeyValues& kv);
  void set(std::string_view key, std::string_view value);

  /// Every key with its resolved value, in key order.
  KeyValues resolved() const;

  /// Building blocks; call validate() first.
  GridSpec grid_spec() const;
  ModelSpec model_spec() const;
  FilterSpec filter_spec() const;
  FilterKind sweep_kind() const;
};

struct Violation {
  std::string key;
  std::string message;
};

/// Empty iff every precondition derivable from the configuration holds.
std::vector<Violation> validate(const ExperimentConfig& config);

/// Parses `path`, applies `--set` style overrides ("key=value") and returns
/// the configuration.  Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

}  // namespace mollify
