#include "bpdl/meanfield/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bpdl/errors.hpp"
#include "bpdl/stats/hypothesis.hpp"

namespace bpdl::meanfield {

DensityField apply_F(const Model& model, const DensityField& f) {
  const auto fd = convolve(model.dispersal, f.values(), model.method);
  const auto fu = convolve(model.competition, f.values(), model.method);
  DensityField out(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double den = model.mu + model.alpha * fu[k];
    if (!(den > 0.0)) {
      throw PoleAtZero("mu + alpha (f * U) vanishes at node " + std::to_string(k));
    }
    // the stencils have nonnegative weights, so tiny negative rounding can
    // only come from fd itself
    out[k] = std::max(0.0, model.gamma * fd[k] / den);
  }
  return out;
}

FixedPointResult fixed_point(const Model& model, const DensityField& start, double tol,
                             int max_iters) {
  FixedPointResult res;
  const bool c0_ok = model.alpha > 0.0 && model.gamma > model.mu;
  const double c0 = c0_ok ? model.carrying_capacity() : 0.0;
  DensityField c = start;
  double running_min = c.inf();
  res.distance_to_c0.push_back(c.sup_distance(c0));
  res.running_min.push_back(running_min);
  for (int it = 0;; ++it) {
    DensityField next = apply_F(model, c);
    const double change = next.sup_distance(c);
    if (change < tol) {
      res.field = std::move(next);
      res.iterations = it;
      return res;
    }
    if (it >= max_iters) {
      throw NoConvergence("F iteration still moving by " + std::to_string(change) + " after " +
                          std::to_string(max_iters) + " updates");
    }
    const double bound = model.mu / (model.mu + model.alpha * running_min);
    c = std::move(next);
    running_min = std::min(running_min, c.inf());
    const double dist = c.sup_distance(c0);
    const double prev = res.distance_to_c0.back();
    res.contraction.push_back(prev > 0.0 ? dist / prev : 0.0);
    res.contraction_bound.push_back(bound);
    res.distance_to_c0.push_back(dist);
    res.running_min.push_back(running_min);
  }
}

AssumptionCReport check_assumption_C(const Model& model, const Kernel& dispersal,
                                     const Kernel& competition) {
  AssumptionCReport r;
  const double g = model.gamma, m = model.mu;
  r.gamma_exceeds_mu = g > m;
  double margin = std::numeric_limits<double>::infinity();
  const Grid& grid = model.grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    margin = std::min(margin, g * model.dispersal.value_at_offset(k) -
                                  (g - m) * model.competition.value_at_offset(k));
  }
  // dense radial sweep, both sides of every breakpoint
  std::vector<double> radii;
  double rmax = std::max(dispersal.support_radius(), competition.support_radius());
  if (!std::isfinite(rmax)) rmax = 0.5 * grid.side;
  for (int i = 0; i <= 4000; ++i) radii.push_back(rmax * i / 4000.0);
  for (const Kernel* k : {&dispersal, &competition}) {
    for (double b : k->radial_breakpoints()) {
      radii.push_back(b);
      radii.push_back(std::nextafter(b, 0.0));
      radii.push_back(std::nextafter(b, 2.0 * b + 1.0));
    }
  }
  for (double rad : radii) {
    margin = std::min(margin, g * dispersal.at_radius(rad) - (g - m) * competition.at_radius(rad));
  }
  r.pointwise_margin = margin;
  r.pointwise_ok = margin >= 0.0;
  if (m > 0.0) {
    const double md = dispersal.numerical_mass(), mu_mass = competition.numerical_mass();
    r.r_mass = md + (g - m) / m * (md - mu_mass);
    r.r_mass_ok = std::abs(r.r_mass - 1.0) <= 1e-6;
  } else {
    r.r_mass = std::numeric_limits<double>::quiet_NaN();
    r.r_mass_ok = true;  // R is not defined; the pointwise condition carries the check
  }
  r.pass = r.gamma_exceeds_mu && r.pointwise_ok && r.r_mass_ok;
  return r;
}

UniquenessReport check_uniqueness_hypotheses(const Model& model, const Kernel& dispersal,
                                             const Kernel& competition) {
  UniquenessReport r;
  r.assumption_c = check_assumption_C(model, dispersal, competition);
  r.gamma_exceeds_2d_mu = model.gamma > std::pow(2.0, model.grid.dim) * model.mu;
  r.alpha_positive = model.alpha > 0.0;
  switch (dispersal.shape()) {
    case KernelShape::tophat:
    case KernelShape::gaussian: r.dispersal_nonincreasing = true; break;
    case KernelShape::annulus: r.dispersal_nonincreasing = dispersal.inner() == 0.0; break;
    case KernelShape::tabulated: {
      const auto& v = dispersal.table_values();
      r.dispersal_nonincreasing = std::is_sorted(v.rbegin(), v.rend());
      break;
    }
    default: r.dispersal_nonincreasing = false;
  }
  r.pass = r.assumption_c.pass && r.gamma_exceeds_2d_mu && r.alpha_positive &&
           r.dispersal_nonincreasing;
  return r;
}

namespace {
std::vector<double> sample_times(double T, int samples) {
  std::vector<double> ts;
  for (int i = 1; i <= samples; ++i) ts.push_back(T * i / samples);
  return ts;
}
}  // namespace

DecayReport l2_decay_check(const Model& model, const DensityField& field0, double T, double dt,
                           int samples) {
  if (!(model.alpha > 0.0 && model.gamma > model.mu)) {
    throw BadConfig("l2_decay_check needs a positive carrying capacity");
  }
  const double c0 = model.carrying_capacity();
  const auto ts = sample_times(T, samples);
  const IntegrateResult res = integrate(model, field0, T, dt, ts);
  DecayReport rep;
  rep.times.push_back(0.0);
  rep.l2.push_back(field0.l2_distance_sq(c0));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    rep.times.push_back(ts[i]);
    rep.l2.push_back(res.outputs[i].l2_distance_sq(c0));
  }
  // monotonicity on every RK step, not only the sampled ones
  for (std::size_t i = 1; i < res.l2_to_c0.size(); ++i) {
    if (res.l2_to_c0[i] > res.l2_to_c0[i - 1] * (1.0 + 1e-12) + 1e-300) rep.nonincreasing = false;
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < rep.l2.size(); ++i) {
    if (rep.l2[i] > 1e-250) {
      x.push_back(rep.times[i]);
      y.push_back(std::log(rep.l2[i]));
    }
  }
  if (x.size() < 3) {
    rep.trivial = rep.l2.front() == 0.0;
    rep.r2 = 1.0;
    return rep;
  }
  const auto fit = stats::linear_fit(x, y);
  rep.rate = -fit.slope;
  rep.r2 = fit.r2;
  return rep;
}

DetailedBalanceReport dbc_bound_check(const Model& model, const DensityField& field0, double T,
                                      double dt, int samples, double tolerance) {
  if (model.mu != 0.0 || !(model.alpha > 0.0)) {
    throw BadConfig("dbc_bound_check needs mu = 0 and alpha > 0");
  }
  const double c0 = model.gamma / model.alpha;
  DensityField low(field0.grid());
  for (std::size_t k = 0; k < field0.size(); ++k) low[k] = std::min(field0[k], c0);
  const auto m = convolve(model.dispersal, low.values(), model.method);
  const auto ts = sample_times(T, samples);
  const IntegrateResult res = integrate(model, field0, T, dt, ts);
  DetailedBalanceReport rep;
  const double floor = tolerance * c0 * c0;
  const DensityField* prev = &field0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const DensityField& xi = res.outputs[i];
    for (std::size_t k = 0; k < xi.size(); ++k) {
      const double d0 = field0[k] - c0;
      const double lhs = (xi[k] - c0) * (xi[k] - c0);
      const double rhs = d0 * d0 * std::exp(-2.0 * model.alpha * m[k] * ts[i]);
      ++rep.checks;
      if (lhs > rhs * (1.0 + tolerance) + floor) rep.bound_holds = false;
      if (rhs > floor) rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
      const double slack = tolerance * c0;
      if (d0 < 0.0) {
        if (xi[k] < (*prev)[k] - slack || xi[k] > c0 + slack) rep.monotone = false;
      } else if (d0 > 0.0) {
        if (xi[k] > (*prev)[k] + slack || xi[k] < c0 - slack) rep.monotone = false;
      }
    }
    prev = &xi;
  }
  return rep;
}

}  // namespace bpdl::meanfield
