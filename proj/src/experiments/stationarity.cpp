#include "bpdl/experiments/stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "bpdl/errors.hpp"
#include "bpdl/quadrature.hpp"
#include "bpdl/reference.hpp"
#include "bpdl/sim/fleet.hpp"

namespace bpdl::experiments {

double Functional::operator()(const Population& pop) const {
  double u = 0.0;
  for (const Point& x : pop.positions()) u += f(x);
  return F(u);
}

Functional Functional::identity(const TestFunction& f) {
  return {"id(" + f.name() + ")", [](double u) { return u; }, f, {}};
}

Functional Functional::clipped(const TestFunction& f, double cap) {
  return {"min(" + f.name() + "," + std::to_string(cap) + ")",
          [cap](double u) { return std::min(u, cap); }, f, {cap}};
}

Functional Functional::saturating(const TestFunction& f) {
  return {"sat(" + f.name() + ")", [](double u) { return u / (1.0 + u); }, f, {}};
}

Functional Functional::arctan(const TestFunction& f) {
  return {"atan(" + f.name() + ")", [](double u) { return std::atan(u); }, f, {}};
}

std::vector<Functional> default_battery() {
  std::vector<Functional> out;
  for (const TestFunction& f :
       {TestFunction::indicator(-1.0, 1.0), TestFunction::triangle(0.0, 1.0)}) {
    out.push_back(Functional::clipped(f, 10.0));
    out.push_back(Functional::saturating(f));
    out.push_back(Functional::arctan(f));
  }
  return out;
}

namespace {

constexpr double kQuadTol = 1e-8;

// int D(z) [F(u + f(x + z)) - F(u)] dz for one parent at x.
double birth_integral(const Functional& phi, double u, const Point& x, const ModelParams& p) {
  const Kernel& D = p.dispersal;
  const SpatialDomain& dom = p.domain;
  const double Fu = phi.F(u);
  auto gain = [&](const Point& y) {
    if (!dom.contains(y)) return 0.0;
    return phi.F(u + phi.f(y)) - Fu;
  };

  if (D.atomic()) {
    const int d = dom.dim();
    if (D.shape() == KernelShape::lattice_point) return D.sup() * gain(x);
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      for (double sgn : {-1.0, 1.0}) {
        Point y = x;
        y[a] += sgn;
        s += D.sup() * gain(y);
      }
    }
    return s;
  }
  if (dom.dim() != 1) throw QuadratureFail("generator quadrature is implemented for d = 1");
  if (dom.periodic()) throw BadConfig("generator evaluation needs an open or box domain");

  if (phi.f.kind() == TestFunction::Kind::constant) {
    const double g = phi.F(u + phi.f(x)) - Fu;
    if (dom.mode() != DomainMode::box) return g * D.mass();
    return g * D.mass_between(dom.lower()[0] - x[0], dom.upper()[0] - x[0]);
  }

  const double r = std::isfinite(D.support_radius()) ? D.support_radius()
                                                      : 12.0 * std::sqrt(D.variance());
  double lo = std::max(-r, phi.f.support_lo() - x[0]);
  double hi = std::min(r, phi.f.support_hi() - x[0]);
  if (dom.mode() == DomainMode::box) {
    lo = std::max(lo, dom.lower()[0] - x[0]);
    hi = std::min(hi, dom.upper()[0] - x[0]);
  }
  if (!(lo < hi)) return 0.0;

  std::vector<double> cuts{lo, hi, 0.0};
  for (double b : D.radial_breakpoints()) {
    cuts.push_back(b);
    cuts.push_back(-b);
  }
  for (double b : phi.f.breakpoints()) cuts.push_back(b - x[0]);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < lo || c > hi; }),
             cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // z where u + f(x + z) crosses a kink of F, by bisection on each piece
  auto fz = [&](double z) {
    Point y = x;
    y[0] += z;
    return phi.f(y);
  };
  const std::size_t pieces = cuts.size();
  for (double k : phi.kinks) {
    const double level = k - u;
    for (std::size_t i = 0; i + 1 < pieces; ++i) {
      double a = cuts[i], b = cuts[i + 1];
      const double ga = fz(a) - level, gb = fz(b) - level;
      if (!(ga * gb < 0.0)) continue;
      const bool rising = ga < 0.0;
      for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        ((fz(m) - level < 0.0) == rising ? a : b) = m;
      }
      cuts.push_back(0.5 * (a + b));
    }
  }
  std::sort(cuts.begin(), cuts.end());

  auto integrand = [&](double z) {
    Point zz{}, y = x;
    zz[0] = z;
    y[0] += z;
    return D(zz) * gain(y);
  };
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate_abs(integrand, cuts[i], cuts[i + 1], 1e-11, 20, err);
  }
  if (err > kQuadTol) throw QuadratureFail("generator birth integral did not reach 1e-8");
  return total;
}

bool inside(const SpatialDomain& inner, const SpatialDomain& outer) {
  for (int a = 0; a < inner.dim(); ++a) {
    if (inner.lower()[a] < outer.lower()[a] || inner.upper()[a] > outer.upper()[a]) return false;
  }
  return true;
}

}  // namespace

double eval_generator(const Functional& phi, const Population& pop, const ModelParams& params) {
  double u = 0.0;
  for (const Point& x : pop.positions()) u += phi.f(x);
  const double Fu = phi.F(u);
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const Point& x = pop[i];
    const double g = params.gamma(x);
    if (g != 0.0) total += g * birth_integral(phi, u, x, params);
    const double loss = phi.F(u - phi.f(x)) - Fu;
    if (loss != 0.0) {
      const double rate = params.mu(x) + params.alpha(x) * competition_sum(pop, x, params);
      total += rate * loss;
    }
  }
  return total;
}

ModelParams stationarity_params(const StationarityPlan& plan) {
  ParamSpec s;
  s.gamma = RateField::constant(plan.gamma);
  s.mu = RateField::constant(plan.mu);
  s.alpha = RateField::constant(plan.alpha);
  s.competition = plan.kernel;
  s.dispersal = plan.kernel;
  s.domain = SpatialDomain::unbounded(1);
  return make_params(s);
}

StationarityReport stationarity_test(const StationarityPlan& plan) {
  if (plan.kernel.dim() != 1) throw BadConfig("stationarity test runs in d = 1");
  if (!(plan.gamma > 0.0 && plan.alpha > 0.0)) throw BadConfig("stationarity needs gamma, alpha > 0");
  if (plan.replicates < 2) throw BadConfig("stationarity test needs at least two replicates");
  const double reach = plan.kernel.support_radius();
  if (!std::isfinite(reach)) throw BadConfig("stationarity window padding needs a compact kernel");

  StationarityReport rep;
  rep.dbc_holds = plan.mu == 0.0 && plan.kernel.at_radius(0.0) == 0.0 &&
                  std::abs(plan.kernel.mass() - 1.0) < 1e-12;
  if (plan.enforce_dbc && !rep.dbc_holds) {
    throw BadConfig("detailed balance needs mu = 0, U(0) = 0 and D = U a probability density");
  }
  for (const Functional& phi : plan.battery) {
    if (!(phi.f.support_lo() >= -plan.inner_half_width && phi.f.support_hi() <= plan.inner_half_width)) {
      throw BadConfig("test function " + phi.f.name() + " is not supported in the inner window");
    }
  }
  rep.intensity = plan.intensity > 0.0 ? plan.intensity : plan.gamma / plan.alpha;
  rep.window = SpatialDomain::box(1, -plan.inner_half_width - reach, plan.inner_half_width + reach);
  const ModelParams params = stationarity_params(plan);

  const auto values = sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
    Rng rng = Rng::stream(plan.seed, id);
    const Population pi = poisson_configuration(rep.window, rep.intensity, rng);
    std::vector<double> out;
    out.reserve(plan.battery.size());
    for (const Functional& phi : plan.battery) out.push_back(eval_generator(phi, pi, params));
    return out;
  });

  rep.all_contain_zero = true;
  rep.none_contain_zero = true;
  for (std::size_t k = 0; k < plan.battery.size(); ++k) {
    std::vector<double> xs;
    xs.reserve(values.size());
    for (const auto& v : values) xs.push_back(v[k]);
    const stats::Summary s = stats::summarize(xs);
    StationarityRow row;
    row.name = plan.battery[k].name;
    row.mean = s.mean;
    row.stderr_ = s.stderr_;
    row.ci = {s.mean - 3.0 * s.stderr_, s.mean + 3.0 * s.stderr_};
    row.contains_zero = row.ci.contains(0.0);
    rep.all_contain_zero = rep.all_contain_zero && row.contains_zero;
    rep.none_contain_zero = rep.none_contain_zero && !row.contains_zero;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string to_string(PalmFunction h) {
  switch (h) {
    case PalmFunction::indicator: return "indicator";
    case PalmFunction::count_weighted: return "count_weighted";
    case PalmFunction::zero: return "zero";
  }
  return "?";
}

SlivnyakReport slivnyak_check(const SlivnyakPlan& plan) {
  if (!plan.window.bounded() || plan.window.periodic()) throw BadConfig("Slivnyak window must be a box");
  if (plan.set.dim() != plan.window.dim() || !inside(plan.set, plan.window)) {
    throw BadConfig("Slivnyak set B must be a box inside the window");
  }
  if (!(plan.intensity > 0.0)) throw BadConfig("Slivnyak intensity must be positive");
  if (plan.replicates < 2) throw BadConfig("Slivnyak check needs at least two replicates");

  SlivnyakReport rep;
  rep.lambda = plan.intensity * plan.set.volume();
  const double mw = plan.intensity * plan.window.volume();
  const std::size_t nh = plan.catalog.size();

  auto count_in_b = [&](const Population& pop) {
    std::size_t c = 0;
    for (const Point& x : pop.positions()) c += plan.set.contains(x) ? 1 : 0;
    return static_cast<double>(c);
  };
  // per replicate: lhs for every h, then rhs for every h
  const auto values = sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
    Rng rng = Rng::stream(plan.seed, id);
    const double nb = count_in_b(poisson_configuration(plan.window, plan.intensity, rng));
    const double nb_palm = count_in_b(poisson_configuration(plan.window, plan.intensity, rng));
    const double in_b = plan.set.contains(plan.window.sample_uniform(rng)) ? 1.0 : 0.0;
    std::vector<double> out(2 * nh, 0.0);
    for (std::size_t k = 0; k < nh; ++k) {
      switch (plan.catalog[k]) {
        case PalmFunction::indicator:
          out[k] = nb;
          out[nh + k] = mw * in_b;
          break;
        case PalmFunction::count_weighted:
          out[k] = nb * nb;
          out[nh + k] = mw * in_b * (nb_palm + 1.0);
          break;
        case PalmFunction::zero:
          break;
      }
    }
    return out;
  });

  rep.all_agree = true;
  for (std::size_t k = 0; k < nh; ++k) {
    std::vector<double> l, r;
    for (const auto& v : values) {
      l.push_back(v[k]);
      r.push_back(v[nh + k]);
    }
    SlivnyakRow row;
    row.h = plan.catalog[k];
    row.lhs = stats::summarize(l);
    row.rhs = stats::summarize(r);
    switch (row.h) {
      case PalmFunction::indicator: row.exact = rep.lambda; break;
      case PalmFunction::count_weighted: row.exact = rep.lambda * rep.lambda + rep.lambda; break;
      case PalmFunction::zero: row.exact = 0.0; break;
    }
    row.intervals_overlap =
        std::abs(row.lhs.mean - row.rhs.mean) <= 3.0 * (row.lhs.stderr_ + row.rhs.stderr_);
    row.exact_in_lhs = std::abs(row.lhs.mean - row.exact) <= 3.0 * row.lhs.stderr_;
    rep.all_agree = rep.all_agree && row.intervals_overlap && row.exact_in_lhs;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace bpdl::experiments
