// Command-line front end: <binary> <task> --config <path> [--out <dir>]
// [--seed <u64>]. Invalid configurations exit nonzero with a single-line
// diagnostic naming the offending field.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rankone/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rank-one symmetric space harmonic analysis toolkit"};
  app.require_subcommand(1);

  const char* tasks[] = {"specfun-check", "nc-transform",  "nc-invert",
                         "nc-plancherel", "nc-cratio",     "nc-step2",
                         "cp-coeffs",     "cp-synth",      "sphere-decompose",
                         "sphere-apply",  "proj-decompose", "chernoff-report"};

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  for (const char* t : tasks) {
    auto* sub = app.add_subcommand(t);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string task = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = rankone::io::load_config(config_path, task, out_dir, seed);
    return rankone::io::run(cfg);
  } catch (const rankone::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: task " << task << ": " << e.what() << "\n";
    return 1;
  }
}
