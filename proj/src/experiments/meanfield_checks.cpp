#include "bpdl/experiments/meanfield_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bpdl/errors.hpp"
#include "bpdl/params.hpp"

namespace bpdl::experiments {

namespace {

meanfield::DensityField wavy(const meanfield::Grid& g, double base, double amp) {
  return meanfield::DensityField::from_function(g, [&](const Point& x) {
    return base * (1.0 + amp * std::sin(2.0 * std::numbers::pi * x[0] / g.side));
  });
}

}  // namespace

double logistic_solution(double n0, double r, double K, double t) {
  return K * n0 * std::exp(r * t) / (K + n0 * (std::exp(r * t) - 1.0));
}

SolverCheckReport solver_check(const SolverCheckPlan& plan) {
  using namespace meanfield;
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, plan.side)));
  const double r = p.gamma.constant_value() - p.mu.constant_value();
  const double K = carrying_capacity(p);
  SolverCheckReport rep;

  const Model m = make_model(p, plan.nodes);
  const auto run = integrate(m, DensityField(m.grid, plan.initial), plan.horizon, plan.dt);
  rep.times = run.times;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    rep.intensity.push_back(run.masses[i] / plan.side);
    rep.closed_form.push_back(logistic_solution(plan.initial, r, K, run.times[i]));
    rep.logistic_max_error =
        std::max(rep.logistic_max_error, std::abs(rep.intensity[i] - rep.closed_form[i]));
  }
  const double final_exact = logistic_solution(plan.initial, r, K, plan.horizon);
  rep.logistic_max_error =
      std::max({rep.logistic_max_error, std::abs(run.final_field.sup() - final_exact),
                std::abs(run.final_field.inf() - final_exact)});
  rep.logistic_ok = rep.logistic_max_error <= plan.logistic_tolerance;

  const Model coarse = make_model(p, plan.order_nodes);
  const double exact = logistic_solution(plan.order_initial, r, K, plan.horizon);
  const DensityField start(coarse.grid, plan.order_initial);
  rep.order_error_coarse =
      std::abs(integrate(coarse, start, plan.horizon, plan.dt).final_field[0] - exact);
  rep.order_error_fine =
      std::abs(integrate(coarse, start, plan.horizon, 0.5 * plan.dt).final_field[0] - exact);
  rep.order_ratio = rep.order_error_coarse / rep.order_error_fine;
  rep.order_ok = rep.order_ratio >= plan.order_lo && rep.order_ratio <= plan.order_hi;

  const double gamma = 1.0, mu = 2.0;
  const Model sub = make_model(gamma, mu, 1.0, Kernel::tophat(1, 3.0),
                               Kernel::tophat_height(1, 0.5, 1.0), Grid(1, 2 * plan.nodes, plan.side));
  const DensityField f0 = DensityField::from_function(
      sub.grid, [](const Point& x) { return 3.0 * std::exp(-x[0] * x[0]) + 0.5; });
  const auto decay = integrate(sub, f0, plan.decay_horizon, plan.dt);
  const double m0 = f0.mass();
  rep.decay_ok = true;
  for (std::size_t i = 0; i < decay.times.size(); ++i) {
    const double bound = m0 * std::exp(-(mu - gamma) * decay.times[i]);
    rep.decay_times.push_back(decay.times[i]);
    rep.decay_mass.push_back(decay.masses[i]);
    rep.decay_bound.push_back(bound);
    rep.decay_worst_ratio = std::max(rep.decay_worst_ratio, decay.masses[i] / bound);
    rep.decay_ok = rep.decay_ok && decay.masses[i] <= bound * (1.0 + plan.decay_slack);
  }
  rep.pass = rep.logistic_ok && rep.order_ok && rep.decay_ok;
  return rep;
}

FixedPointCheck fixed_point_check(const FixedPointPlan& plan) {
  using namespace meanfield;
  const Kernel d = Kernel::gaussian(1, 1.0);
  const Kernel u = Kernel::gaussian(1, 0.5);
  const Model m = make_model(3.0, 1.0, 1.0, d, u, Grid(1, plan.nodes, plan.side));
  FixedPointCheck rep;
  rep.c0 = m.carrying_capacity();
  rep.f_residual = apply_F(m, DensityField(m.grid, rep.c0)).sup_distance(rep.c0);
  rep.f_ok = rep.f_residual <= 1e-12;
  rep.hypotheses = check_uniqueness_hypotheses(m, d, u);
  rep.run = fixed_point(m, wavy(m.grid, rep.c0, plan.amplitude), plan.tolerance, plan.max_iters);
  rep.final_distance = rep.run.field.sup_distance(rep.c0);
  rep.converged = rep.final_distance <= 1e-10;
  rep.contraction_ok = true;
  rep.worst_contraction_margin = -1.0;
  for (std::size_t k = 0; k < rep.run.contraction.size(); ++k) {
    if (rep.run.distance_to_c0[k] < plan.contraction_floor) break;
    const double margin = rep.run.contraction[k] - rep.run.contraction_bound[k];
    rep.worst_contraction_margin = std::max(rep.worst_contraction_margin, margin);
    rep.contraction_ok = rep.contraction_ok && margin <= 1e-12;
  }
  rep.pass = rep.f_ok && rep.hypotheses.pass && rep.converged && rep.contraction_ok;
  return rep;
}

DecayCheck decay_check(const DecayPlan& plan) {
  using namespace meanfield;
  DecayCheck rep;
  const Kernel a = Kernel::annulus(1, 0.25, 0.75);
  const Model dbc = make_model(2.0, 0.0, 0.5, a, a, Grid(1, plan.nodes, plan.side));
  rep.dbc = dbc_bound_check(dbc, wavy(dbc.grid, dbc.carrying_capacity(), 0.5), plan.dbc_horizon,
                            plan.dt, plan.samples);

  const Kernel g = Kernel::gaussian(1, 0.5);
  const Model m = make_model(3.0, 1.0, 1.0, g, g, Grid(1, plan.nodes, plan.side));
  const double c0 = m.carrying_capacity();
  const DensityField f0 = DensityField::from_function(
      m.grid, [&](const Point& x) { return c0 + 0.5 * std::exp(-x[0] * x[0]); });
  rep.l2 = l2_decay_check(m, f0, plan.l2_horizon, plan.dt, plan.samples);
  rep.l2_ok = rep.l2.nonincreasing && rep.l2.r2 > plan.min_r2 && rep.l2.rate > 0.0;
  rep.pass = rep.dbc.bound_holds && rep.dbc.monotone && rep.l2_ok;
  return rep;
}

}  // namespace bpdl::experiments
