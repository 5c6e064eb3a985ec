#include "bpdl/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bpdl/errors.hpp"

#ifndef BPDL_DEFAULT_PRESET_DIR
#define BPDL_DEFAULT_PRESET_DIR "presets"
#endif

namespace bpdl::cli {

namespace {

std::string line_of(const YAML::Node& n) {
  const auto mark = n.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ")";
}

YAML::Node parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    YAML::Node n = YAML::Load(ss.str());
    if (n.IsNull()) return YAML::Node(YAML::NodeType::Map);
    if (!n.IsMap()) throw BadConfig(path.string() + ": top level must be a map");
    return n;
  } catch (const YAML::Exception& e) {
    throw BadConfig(path.string() + ": " + e.what());
  }
}

}  // namespace

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("BPDL_PRESET_DIR"); env && *env) return env;
  return BPDL_DEFAULT_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(preset_dir(), ec)) {
    if (e.path().extension() == ".yaml") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

YAML::Node merge(const YAML::Node& base, const YAML::Node& over) {
  if (!base.IsMap() || !over.IsMap()) return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : over) {
    const auto key = kv.first.as<std::string>();
    out[key] = out[key] ? merge(out[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

YAML::Node load_config(const std::optional<std::string>& preset,
                       const std::optional<std::filesystem::path>& path) {
  if (!preset && !path) throw BadConfig("give --preset NAME or --config PATH");
  YAML::Node cfg(YAML::NodeType::Map);
  if (preset) {
    const auto file = preset_dir() / (*preset + ".yaml");
    if (!std::filesystem::exists(file)) {
      std::string names;
      for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
      throw BadConfig("unknown preset '" + *preset + "'; available: " + names);
    }
    cfg = parse_file(file);
  }
  if (path) cfg = merge(cfg, parse_file(*path));
  return cfg;
}

bool Section::has(const std::string& key) const {
  return node_.IsMap() && node_[key] && !node_[key].IsNull();
}

YAML::Node Section::get(const std::string& key) const {
  if (!node_.IsMap()) fail("must be a map");
  YAML::Node n = node_[key];
  if (!n || n.IsNull()) fail("missing field", key);
  return n;
}

void Section::fail(const std::string& what, const std::string& key) const {
  std::string where = path_;
  if (!key.empty()) where += (where.empty() ? "" : ".") + key;
  YAML::Node at = node_;
  if (!key.empty() && node_.IsMap() && node_[key]) at = node_[key];
  throw BadConfig(what + " '" + where + "'" + line_of(at));
}

Section Section::child(const std::string& key) const {
  return Section(get(key), path_.empty() ? key : path_ + "." + key);
}

std::optional<Section> Section::maybe_child(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return child(key);
}

double Section::number(const std::string& key) const {
  const YAML::Node n = get(key);
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail("expected a number for", key);
  }
}

double Section::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::uint64_t Section::count(const std::string& key) const {
  const YAML::Node n = get(key);
  try {
    const auto v = n.as<long long>();
    if (v < 0) fail("expected a nonnegative integer for", key);
    return static_cast<std::uint64_t>(v);
  } catch (const YAML::Exception&) {
    fail("expected an integer for", key);
  }
}

std::uint64_t Section::count(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? count(key) : fallback;
}

bool Section::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  try {
    return get(key).as<bool>();
  } catch (const YAML::Exception&) {
    fail("expected true or false for", key);
  }
}

std::string Section::text(const std::string& key) const {
  const YAML::Node n = get(key);
  if (!n.IsScalar()) fail("expected a string for", key);
  return n.as<std::string>();
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::vector<double> Section::numbers(const std::string& key) const {
  const YAML::Node n = get(key);
  if (n.IsScalar()) return {number(key)};
  if (!n.IsSequence()) fail("expected a list of numbers for", key);
  try {
    return n.as<std::vector<double>>();
  } catch (const YAML::Exception&) {
    fail("expected a list of numbers for", key);
  }
}

std::vector<double> Section::numbers(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

SpatialDomain parse_domain(const Section& s) {
  const std::string mode = s.text("mode");
  const int dim = static_cast<int>(s.count("dim", 1));
  try {
    switch (domain_mode_from_string(mode)) {
      case DomainMode::unbounded: return SpatialDomain::unbounded(dim);
      case DomainMode::torus: return SpatialDomain::torus(dim, s.number("side"));
      case DomainMode::box: return SpatialDomain::box(dim, s.number("lo"), s.number("hi"));
      case DomainMode::lattice: return SpatialDomain::lattice(dim);
    }
  } catch (const BadConfig&) {
    throw;
  } catch (const Error& e) {
    s.fail(e.what());
  }
  s.fail("unknown domain mode in", "mode");
}

Kernel parse_kernel(const Section& s, int dim) {
  const std::string shape = s.text("shape");
  KernelShape k;
  try {
    k = kernel_shape_from_string(shape);
  } catch (const Error&) {
    s.fail("unknown kernel shape '" + shape + "' in", "shape");
  }
  try {
    switch (k) {
      case KernelShape::tophat:
        if (s.has("height")) return Kernel::tophat_height(dim, s.number("radius"), s.number("height"));
        return Kernel::tophat(dim, s.number("radius"), s.number("mass", 1.0));
      case KernelShape::annulus:
        return Kernel::annulus(dim, s.number("inner"), s.number("outer"), s.number("mass", 1.0));
      case KernelShape::gaussian:
        return Kernel::gaussian(dim, s.number("variance"), s.number("mass", 1.0));
      case KernelShape::lattice_nn: return Kernel::lattice_nn(dim);
      case KernelShape::lattice_point: return Kernel::lattice_point(dim);
      case KernelShape::tabulated:
        return Kernel::tabulated(dim, s.numbers("radii"), s.numbers("values"));
    }
  } catch (const BadConfig&) {
    throw;
  } catch (const Error& e) {
    s.fail(e.what());
  }
  s.fail("unsupported kernel in", "shape");
}

RateField parse_rate(const Section& parent, const std::string& key) {
  if (!parent.has(key)) parent.fail("missing field", key);
  if (parent.node()[key].IsScalar()) {
    const double v = parent.number(key);
    if (v < 0.0) parent.fail("rate must be nonnegative:", key);
    return RateField::constant(v);
  }
  const Section t = parent.child(key).child("table");
  try {
    return RateField::tabulated(t.numbers("x"), t.numbers("values"));
  } catch (const BadConfig&) {
    throw;
  } catch (const Error& e) {
    t.fail(e.what());
  }
}

ParamSpec parse_model_spec(const Section& s) {
  ParamSpec spec;
  spec.domain = parse_domain(s.child("domain"));
  const int dim = spec.domain.dim();
  spec.gamma = parse_rate(s, "gamma");
  spec.mu = parse_rate(s, "mu");
  spec.alpha = parse_rate(s, "alpha");
  spec.competition = parse_kernel(s.child("competition"), dim);
  spec.dispersal = parse_kernel(s.child("dispersal"), dim);
  if (s.has("probe_extent")) spec.probe_extent = s.number("probe_extent");
  return spec;
}

ModelParams parse_model(const Section& s) {
  const ParamSpec spec = parse_model_spec(s);
  try {
    return make_params(spec);
  } catch (const BadConfig&) {
    throw;
  } catch (const Error& e) {
    s.fail(e.what());
  }
}

Population parse_initial(const Section& s, const ModelParams& params, std::uint64_t seed) {
  const int dim = params.dim();
  Population pop(dim);
  if (s.has("points")) {
    const YAML::Node pts = s.node()["points"];
    if (!pts.IsSequence()) s.fail("expected a list of points for", "points");
    for (const auto& item : pts) {
      Point x{};
      try {
        if (item.IsScalar()) {
          x[0] = item.as<double>();
        } else {
          const auto c = item.as<std::vector<double>>();
          if (static_cast<int>(c.size()) != dim) s.fail("point dimension mismatch in", "points");
          for (int a = 0; a < dim; ++a) x[a] = c[a];
        }
      } catch (const YAML::Exception&) {
        s.fail("malformed point in", "points");
      }
      pop.add(x);
    }
    return pop;
  }
  if (s.has("uniform")) {
    if (!params.domain.bounded()) s.fail("uniform start needs a bounded domain:", "uniform");
    Rng rng = Rng::stream(seed, ~std::uint64_t{0});
    const auto n = s.count("uniform");
    for (std::uint64_t k = 0; k < n; ++k) pop.add(params.domain.sample_uniform(rng));
    return pop;
  }
  Point x{};
  if (s.has("at")) {
    const auto c = s.numbers("at");
    if (static_cast<int>(c.size()) != dim) s.fail("point dimension mismatch in", "at");
    for (int a = 0; a < dim; ++a) x[a] = c[a];
  }
  return Population::repeated(dim, x, s.count("count"));
}

sim::EngineKind parse_engine(const std::string& name) {
  try {
    return sim::engine_kind_from_string(name);
  } catch (const Error&) {
    throw BadConfig("unknown engine '" + name + "' (faithful, indexed, automatic)");
  }
}

}  // namespace bpdl::cli
