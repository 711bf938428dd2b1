#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mollify/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mollified market model laboratory"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  for (const char* name : {"simulate", "closeness", "forecast", "hedge", "distinguish", "all"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Configuration file")->required();
    sub->add_option("--set", overrides, "Override a key, e.g. --set metrics.n_paths=64");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--out", out_dir, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage mistakes count as configuration errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  mollify::RunOptions options;
  options.overrides = overrides;
  options.seed = seed;
  if (!out_dir.empty()) options.output_dir = out_dir;
  return mollify::run(app.get_subcommands().front()->get_name(), config_path, options, std::cerr);
}
