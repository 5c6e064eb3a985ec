#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "bpdl/cli/config.hpp"
#include "bpdl/cli/output.hpp"

namespace bpdl::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitFailed = 3;

/// Everything a subcommand needs: the merged config and the run settings
/// (flags override the config's `seed` and `threads`).
struct RunContext {
  YAML::Node config;
  std::string preset;
  std::uint64_t seed = 1;
  int threads = 0;
  bool expensive = false;
};

/// Summary and pass flag of a finished subcommand. `pass` is false when an
/// acceptance flag of the run is false.
struct CommandResult {
  Json summary;
  bool pass = true;
};

CommandResult simulate(const RunContext& ctx, OutputDir& out);
CommandResult meanfield(const RunContext& ctx, OutputDir& out);
CommandResult experiment(const std::string& name, const RunContext& ctx, OutputDir& out);

/// Experiment names accepted by `experiment`.
const std::vector<std::string>& experiment_names();

/// Flags as given on the command line.
struct Invocation {
  std::string command;  // simulate, meanfield or experiment
  std::optional<std::string> experiment;
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::filesystem::path out = "out";
  bool expensive = false;
};

/// Loads the config, runs the subcommand, writes summary.json, the
/// effective config and manifest.json into the output directory, and
/// returns the exit code. BadConfig and UnknownExperiment propagate.
int execute(const Invocation& inv);

}  // namespace bpdl::cli
