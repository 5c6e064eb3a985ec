#include "bpdl/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "bpdl/errors.hpp"

namespace bpdl {

namespace {

constexpr int kRateProbes = 10000;
constexpr int kEnvelopeProbes = 10000;
constexpr double kMassTolerance = 1e-6;

std::vector<Point> probe_points(const ParamSpec& spec) {
  const SpatialDomain& dom = spec.domain;
  const int d = dom.dim();
  Rng rng(0x5eed'0f'9a'0bULL);
  std::vector<Point> pts;
  pts.reserve(kRateProbes + 64);
  for (int i = 0; i < kRateProbes; ++i) {
    Point p{};
    if (dom.bounded()) {
      p = dom.sample_uniform(rng);
    } else {
      for (int a = 0; a < d; ++a) p[a] = rng.uniform(-spec.probe_extent, spec.probe_extent);
      if (dom.mode() == DomainMode::lattice) {
        for (int a = 0; a < d; ++a) p[a] = std::round(p[a]);
      }
    }
    pts.push_back(p);
  }
  for (const RateField* f : {&spec.gamma, &spec.mu, &spec.alpha}) {
    for (double x : f->table_x()) {
      Point p{};
      p[0] = x;
      pts.push_back(p);
    }
  }
  return pts;
}

double validate_rate(const char* name, const RateField& field, std::optional<double> declared,
                     const std::vector<Point>& probes) {
  double observed = 0.0;
  if (field.is_constant()) {
    observed = field.constant_value();
  } else {
    for (const Point& p : probes) observed = std::max(observed, field(p));
  }
  if (field.is_constant() && field.constant_value() < 0.0) {
    throw NegativeRate(std::string(name) + " is negative");
  }
  if (field.is_tabulated()) {
    for (double v : field.table_values()) {
      if (v < 0.0) throw NegativeRate(std::string(name) + " table has a negative value");
    }
  }
  for (const Point& p : probes) {
    if (field(p) < 0.0) {
      std::ostringstream os;
      os << name << "(" << p[0] << ") = " << field(p) << " < 0";
      throw NegativeRate(os.str());
    }
    if (field.is_constant()) break;
  }
  double bar = field.bound_is_exact() ? field.bound() : std::max(field.bound(), observed);
  if (!field.bound_is_exact() && observed > field.bound()) {
    throw EnvelopeViolated(std::string(name) + " exceeds its declared bound");
  }
  if (declared) {
    if (*declared < bar * (1.0 - 1e-12)) {
      throw EnvelopeViolated(std::string(name) + "_bar is below the field's supremum");
    }
    // loose declarations are tightened to the known supremum
    if (!field.bound_is_exact()) bar = std::min(*declared, bar);
  }
  return bar;
}

void check_mass(const char* name, const Kernel& k, std::optional<double> declared) {
  const double numeric = k.numerical_mass();
  if (std::abs(numeric - k.mass()) > kMassTolerance * std::max(1.0, k.mass())) {
    throw BadKernel(std::string(name) + ": quadrature mass disagrees with the declared shape");
  }
  if (declared && std::abs(numeric - *declared) > kMassTolerance * std::max(1.0, *declared)) {
    std::ostringstream os;
    os << name << ": mass " << numeric << " differs from declared " << *declared;
    throw BadKernel(os.str());
  }
}

double envelope_ratio_sup(const Kernel& d, const Kernel& env, double c_declared) {
  Rng rng(0xe7e1'09eULL);
  double worst = 0.0;
  auto probe = [&](const Point& z) {
    const double dz = d(z);
    if (dz <= 0.0) return;
    const double ez = env(z);
    if (ez <= 0.0) {
      throw EnvelopeViolated("D > 0 where the envelope density vanishes");
    }
    worst = std::max(worst, dz / ez);
  };
  for (int i = 0; i < kEnvelopeProbes; ++i) {
    probe(i % 2 == 0 ? d.sample(rng) : env.sample(rng));
  }
  if (!d.atomic()) {
    // dense radial sweep including both sides of each breakpoint
    std::vector<double> radii;
    const double rmax = std::isfinite(d.support_radius()) ? d.support_radius()
                                                           : 12.0 * std::sqrt(d.variance());
    for (int i = 0; i <= 2000; ++i) radii.push_back(rmax * i / 2000.0);
    for (double b : d.radial_breakpoints()) {
      radii.push_back(b);
      radii.push_back(std::nextafter(b, 0.0));
    }
    for (double r : radii) {
      Point z{};
      z[0] = r;
      probe(z);
    }
  }
  if (worst > c_declared * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "D(z) / D_env(z) reaches " << worst << " > C = " << c_declared;
    throw EnvelopeViolated(os.str());
  }
  return worst;
}

}  // namespace

ModelParams make_params(const ParamSpec& spec) {
  const int d = spec.domain.dim();
  if (spec.competition.dim() != d || spec.dispersal.dim() != d) {
    throw BadConfig("kernel dimension does not match the domain");
  }
  const auto probes = probe_points(spec);

  ModelParams p;
  p.domain = spec.domain;
  p.gamma = spec.gamma;
  p.mu = spec.mu;
  p.alpha = spec.alpha;
  p.gamma_bar = validate_rate("gamma", spec.gamma, spec.gamma_bar, probes);
  p.mu_bar = validate_rate("mu", spec.mu, spec.mu_bar, probes);
  p.alpha_bar = validate_rate("alpha", spec.alpha, spec.alpha_bar, probes);

  check_mass("competition", spec.competition, spec.competition_declared_mass);
  check_mass("dispersal", spec.dispersal, spec.dispersal_declared_mass);
  if (std::abs(spec.dispersal.mass() - 1.0) > kMassTolerance) {
    throw BadKernel("dispersal kernel must be a probability density");
  }
  p.competition = spec.competition;
  p.dispersal = spec.dispersal;

  p.u_bar = spec.competition.sup();
  if (spec.u_bar) {
    if (*spec.u_bar < p.u_bar * (1.0 - 1e-12)) {
      throw EnvelopeViolated("U_bar is below sup U");
    }
  }

  if (spec.envelope) {
    if (spec.envelope->dim() != d) throw BadConfig("envelope dimension does not match");
    if (std::abs(spec.envelope->mass() - 1.0) > kMassTolerance) {
      throw BadKernel("envelope must be a probability density");
    }
    p.envelope = *spec.envelope;
  } else {
    p.envelope = spec.dispersal;
  }
  const double c_declared = spec.envelope_const.value_or(1.0);
  if (!(c_declared > 0.0)) throw EnvelopeViolated("envelope constant C must be positive");
  const double worst = envelope_ratio_sup(p.dispersal, p.envelope, c_declared);
  if (p.envelope.same_law_as(p.dispersal)) {
    p.envelope_const = 1.0;
  } else {
    p.envelope_const = std::min(c_declared, worst * (1.0 + 1e-9));
  }
  return p;
}

ParamSpec reference_spec(const SpatialDomain& domain) {
  ParamSpec s;
  s.domain = domain;
  s.gamma = RateField::constant(5.0);
  s.mu = RateField::constant(1.0);
  s.alpha = RateField::constant(1.0);
  s.competition = Kernel::tophat_height(1, 0.5, 1.0);
  s.dispersal = Kernel::tophat(1, 3.0, 1.0);
  return s;
}

double carrying_capacity(const ModelParams& params) {
  if (!params.constant_rates()) throw BadConfig("carrying capacity needs constant rates");
  return (params.gamma.constant_value() - params.mu.constant_value()) /
         params.alpha.constant_value();
}

}  // namespace bpdl
