#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/sim/event.hpp"

namespace bpdl::cli {

/// Directory holding the shipped presets: BPDL_PRESET_DIR when set, else the
/// directory compiled in at build time.
std::filesystem::path preset_dir();

/// Names of the shipped presets (file stems), sorted.
std::vector<std::string> preset_names();

/// Loads the named preset, then a config file on top of it (maps merge key
/// by key, everything else is replaced). At least one must be given.
/// Throws BadConfig on unreadable or malformed input.
YAML::Node load_config(const std::optional<std::string>& preset,
                       const std::optional<std::filesystem::path>& path);

/// Recursive map merge: keys of `over` replace or extend those of `base`.
YAML::Node merge(const YAML::Node& base, const YAML::Node& over);

/// Read access to a YAML map that reports missing or malformed fields with
/// their dotted path and line.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;

  Section child(const std::string& key) const;  // required
  std::optional<Section> maybe_child(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

  /// BadConfig naming this section (and `key` when given) and its line.
  [[noreturn]] void fail(const std::string& what, const std::string& key = "") const;

 private:
  YAML::Node get(const std::string& key) const;

  YAML::Node node_;
  std::string path_;
};

SpatialDomain parse_domain(const Section& s);
/// A kernel description; `dim` comes from the domain.
Kernel parse_kernel(const Section& s, int dim);
/// A number, or {table: {x: [...], values: [...]}}.
RateField parse_rate(const Section& parent, const std::string& key);
/// The `model` section: rates gamma, mu, alpha; kernels competition and
/// dispersal; domain. Validated through make_params.
ModelParams parse_model(const Section& s);
ParamSpec parse_model_spec(const Section& s);
/// {count: n, at: x} | {uniform: n} | {points: [...]}.
Population parse_initial(const Section& s, const ModelParams& params, std::uint64_t seed);
sim::EngineKind parse_engine(const std::string& name);

}  // namespace bpdl::cli
