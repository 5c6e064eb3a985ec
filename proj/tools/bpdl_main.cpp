#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bpdl/cli/commands.hpp"
#include "bpdl/errors.hpp"

namespace {

struct Flags {
  std::string preset;
  std::string config;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = "out";
  bool expensive = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--preset", f.preset, "shipped preset name (see presets/)");
  cmd->add_option("--config", f.config, "YAML config, merged over the preset");
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--threads", f.threads, "worker threads (default: BPDL_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_flag("--expensive", f.expensive, "allow long-running experiments");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = bpdl::cli;
  CLI::App app{"Birth, dispersal and logistic death processes: simulation and checks"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  Flags f;
  std::string experiment;
  auto* sim = app.add_subcommand("simulate", "simulate a configured model");
  add_common(sim, f);
  auto* mf = app.add_subcommand("meanfield", "integrate or check the mean-field equation");
  add_common(mf, f);
  auto* ex = app.add_subcommand("experiment", "run a named experiment");
  ex->add_option("name", experiment, "experiment name (default: the config's experiment)");
  add_common(ex, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitBadConfig;
  }

  cli::Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  if (inv.command == "experiment" && !experiment.empty()) inv.experiment = experiment;
  if (!f.preset.empty()) inv.preset = f.preset;
  if (!f.config.empty()) inv.config = f.config;
  if (sim->count("--seed") + mf->count("--seed") + ex->count("--seed") > 0) inv.seed = f.seed;
  if (sim->count("--threads") + mf->count("--threads") + ex->count("--threads") > 0) {
    inv.threads = f.threads;
  }
  inv.out = f.out;
  inv.expensive = f.expensive;

  try {
    return cli::execute(inv);
  } catch (const bpdl::BadConfig& e) {
    std::cerr << "bpdl: " << e.what() << "\n";
    return cli::kExitBadConfig;
  } catch (const bpdl::UnknownExperiment& e) {
    std::cerr << "bpdl: " << e.what() << "\n";
    return cli::kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "bpdl: " << e.what() << "\n";
    return cli::kExitError;
  }
}
