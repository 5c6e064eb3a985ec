#include <cmath>
#include <vector>

#include "bpdl/errors.hpp"
#include "bpdl/experiments/extinction.hpp"
#include "bpdl/experiments/meanfield_checks.hpp"
#include "bpdl/experiments/oracles.hpp"
#include "bpdl/experiments/reference_runs.hpp"
#include "bpdl/experiments/scaling.hpp"
#include "bpdl/experiments/stationarity.hpp"
#include "bpdl/meanfield/solver.hpp"
#include "bpdl/params.hpp"
#include "doctest.h"

using namespace bpdl;
using namespace bpdl::experiments;

namespace {

Point pt(double x) {
  Point p{};
  p[0] = x;
  return p;
}

}  // namespace

TEST_CASE("linear chain matches the closed-form extinction law") {
  const BirthDeathChain chain = BirthDeathChain::linear(1.0, 2.0, 400);
  for (double t : {0.5, 1.0, 3.0}) {
    CHECK(chain.extinction_cdf(1, t) == doctest::Approx(linear_extinction_probability(1.0, 2.0, t)).epsilon(1e-9));
    const double p1 = linear_extinction_probability(1.0, 2.0, t);
    CHECK(chain.extinction_cdf(3, t) == doctest::Approx(p1 * p1 * p1).epsilon(1e-9));
  }
  // single ancestor: E T = log(mu / (mu - lambda)) / lambda
  CHECK(chain.mean_extinction_time(1) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  const double q = chain.extinction_quantile(10, 0.99);
  CHECK(chain.extinction_cdf(10, q) == doctest::Approx(0.99).epsilon(1e-5));
  CHECK(linear_extinction_probability(1.0, 1.0, 2.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("logistic chain distribution is a probability vector") {
  const BirthDeathChain chain = BirthDeathChain::logistic(2.0, 1.0, 0.25, 120);
  const auto p = chain.distribution(1, 5.0);
  double s = 0.0;
  for (double v : p) {
    CHECK(v >= -1e-15);
    s += v;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chain.mean_extinction_time(1) > 0.0);
  CHECK_THROWS_AS(BirthDeathChain::linear(1.0, 0.0, 10), BadConfig);
}

TEST_CASE("cube count, competition floor and the mass bound") {
  CHECK(cube_count(SpatialDomain::torus(1, 4.0), 0.5) == 8);
  CHECK(cube_count(SpatialDomain::torus(1, 2.0), 0.5) == 4);
  // side delta / sqrt(2) = 0.5 in the plane
  CHECK(cube_count(SpatialDomain::torus(2, 1.0), 0.5 * std::sqrt(2.0)) == 4);
  const CompetitionFloor fl = competition_floor(Kernel::tophat_height(1, 0.5, 1.0));
  CHECK(fl.epsilon == 1.0);
  CHECK(fl.delta == 0.5);
  CHECK(mass_bound_x0(4.0, 1.0, 1.0, 8) == 32.0);
  CHECK_THROWS_AS(competition_floor(Kernel::annulus(1, 0.25, 0.75)), BadConfig);
  CHECK_THROWS_AS(cube_count(SpatialDomain::unbounded(1), 0.5), BadConfig);
}

TEST_CASE("condition for lattice survival") {
  CHECK(lattice_survival_condition(13.0, 1.0, 2.0, 1));
  CHECK_FALSE(lattice_survival_condition(4.0, 1.0, 2.0, 1));
  CHECK_FALSE(lattice_survival_condition(24.0, 1.0, 2.0, 2));  // 24 / 4 / 3 = 2 is not > 2
}

TEST_CASE("generator of trivial functionals vanishes") {
  StationarityPlan plan;
  const ModelParams p = stationarity_params(plan);
  Population pop(1, {pt(0.1), pt(0.6), pt(-0.9)});
  const Functional c{"const", [](double) { return 3.0; }, TestFunction::indicator(-1.0, 1.0), {}};
  CHECK(eval_generator(c, pop, p) == 0.0);
  for (const Functional& phi : default_battery()) CHECK(eval_generator(phi, Population(1), p) == 0.0);
}

TEST_CASE("generator of a single point against the closed form") {
  ParamSpec s;
  s.gamma = RateField::constant(2.0);
  s.mu = RateField::constant(0.3);
  s.alpha = RateField::constant(0.5);
  s.competition = Kernel::tophat_height(1, 0.5, 1.0);
  s.dispersal = Kernel::annulus(1, 0.25, 0.75);
  s.domain = SpatialDomain::unbounded(1);
  const ModelParams p = make_params(s);
  const TestFunction f = TestFunction::indicator(-1.0, 1.0);
  const Functional phi = Functional::identity(f);
  // D mass inside [-1.5, 0.5] is 0.5 + 0.25; U(0) = 1
  const Population one(1, {pt(0.5)});
  CHECK(eval_generator(phi, one, p) == doctest::Approx(2.0 * 0.75 - 1.0 * (0.3 + 0.5)).epsilon(1e-10));
  // triangle: compare with the smoothed-kernel integral
  const TestFunction tri = TestFunction::triangle(0.0, 1.0);
  const double expect = 2.0 * tri.smoothed(p.dispersal, pt(0.4), p.domain) - tri(pt(0.4)) * 0.8;
  CHECK(eval_generator(Functional::identity(tri), Population(1, {pt(0.4)}), p) ==
        doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("generator of a linear functional is the mean drift") {
  // F = identity: L<nu, f> = sum_i gamma (D * f)(x_i) - (mu + alpha S_i) f(x_i)
  StationarityPlan plan;
  plan.mu = 0.2;
  const ModelParams p = stationarity_params(plan);
  const TestFunction f = TestFunction::triangle(0.0, 1.0);
  Population pop(1, {pt(-0.3), pt(0.2), pt(0.5), pt(1.4)});
  double expect = 0.0;
  for (const Point& x : pop.positions()) {
    double load = 0.0;
    for (const Point& y : pop.positions()) load += p.competition(pt(x[0] - y[0]));
    expect += plan.gamma * f.smoothed(p.dispersal, x, p.domain) - (plan.mu + plan.alpha * load) * f(x);
  }
  CHECK(eval_generator(Functional::identity(f), pop, p) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("stationarity plan validation") {
  StationarityPlan plan;
  plan.mu = 0.5;
  CHECK_THROWS_AS(stationarity_test(plan), BadConfig);
  StationarityPlan wide;
  wide.battery = {Functional::identity(TestFunction::indicator(-3.0, 3.0))};
  CHECK_THROWS_AS(stationarity_test(wide), BadConfig);
}

TEST_CASE("Poisson field is stationary under detailed balance (small run)") {
  StationarityPlan plan;
  plan.replicates = 3000;
  plan.seed = 11;
  const StationarityReport rep = stationarity_test(plan);
  CHECK(rep.dbc_holds);
  CHECK(rep.intensity == doctest::Approx(4.0));
  CHECK(rep.window.lower()[0] == doctest::Approx(-1.75));
  CHECK(rep.rows.size() == 6);
  CHECK(rep.all_contain_zero);

  plan.enforce_dbc = false;
  plan.mu = 0.5;
  const StationarityReport broken = stationarity_test(plan);
  CHECK_FALSE(broken.dbc_holds);
  for (const auto& row : broken.rows) CHECK(row.mean < 0.0);
}

TEST_CASE("Slivnyak identity on a small catalog") {
  SlivnyakPlan plan;
  plan.replicates = 5000;
  plan.seed = 3;
  const SlivnyakReport rep = slivnyak_check(plan);
  CHECK(rep.lambda == doctest::Approx(2.0));
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[1].exact == doctest::Approx(6.0));
  CHECK(rep.rows[2].lhs.mean == 0.0);
  CHECK(rep.rows[2].rhs.mean == 0.0);
  CHECK(rep.all_agree);
  SlivnyakPlan bad = plan;
  bad.set = SpatialDomain::box(1, 1.0, 3.0);
  CHECK_THROWS_AS(slivnyak_check(bad), BadConfig);
}

TEST_CASE("subcritical extinction against the linear chain") {
  ParamSpec s = reference_spec(SpatialDomain::torus(1, 40.0));
  s.gamma = RateField::constant(1.0);
  s.mu = RateField::constant(2.0);
  ExtinctionPlan plan;
  plan.params = make_params(s);
  plan.initial = Population::repeated(1, pt(0.0), 10);
  plan.replicates = 60;
  plan.seed = 5;
  const ExtinctionReport rep = extinction_experiment(plan);
  CHECK(rep.cap_from_oracle);
  CHECK(rep.extinct == 60);
  CHECK(rep.mean_time_within_oracle);
  CHECK(rep.mean_mass.front() == 10.0);
  CHECK(rep.mean_mass.back() == 0.0);
}

TEST_CASE("compact extinction with the adaptive cap") {
  ParamSpec s;
  s.gamma = RateField::constant(2.0);
  s.mu = RateField::constant(1.0);
  s.alpha = RateField::constant(1.0);
  s.competition = Kernel::tophat_height(1, 0.5, 1.0);
  s.dispersal = Kernel::tophat(1, 1.0);
  s.domain = SpatialDomain::torus(1, 2.0);
  ExtinctionPlan plan;
  plan.params = make_params(s);
  plan.initial = Population::repeated(1, pt(0.0), 1);
  plan.replicates = 40;
  plan.seed = 9;
  const ExtinctionReport rep = extinction_experiment(plan);
  CHECK(rep.cubes == 4);
  CHECK(rep.x0 == doctest::Approx(4.0));
  CHECK(rep.chain_kappa == doctest::Approx(0.25));
  CHECK(rep.extinct == 40);
  CHECK(rep.mass_bound_ok);
  CHECK(rep.sup_mean_mass <= rep.mass_bound + 1e-12);
}

TEST_CASE("lattice runs: pure death and the contact process") {
  LatticePlan dead;
  dead.gamma = 0.0;
  dead.horizon = 10.0 / (dead.mu + dead.alpha);
  dead.replicates = 50;
  const LatticeReport r0 = lattice_survival(dead);
  CHECK(r0.bpdl_survival < 0.1);
  CHECK_FALSE(r0.condition_holds);

  Rng rng(1);
  const ContactRun c = run_contact_process(1, 0.0, 1.0, 100.0, 10, rng);
  CHECK_FALSE(c.alive);
  Rng rng2(2);
  const ContactRun big = run_contact_process(2, 50.0, 1.0, 100.0, 30, rng2);
  CHECK(big.established);

  LatticePlan live;
  live.replicates = 60;
  live.seed = 4;
  const LatticeReport r1 = lattice_survival(live);
  CHECK(r1.condition_holds);
  CHECK(r1.positive);
  CHECK(r1.dominates);
}

TEST_CASE("mean-field scaling: limit and error table") {
  ParamSpec s;
  s.gamma = RateField::constant(2.0);
  s.mu = RateField::constant(1.0);
  s.alpha = RateField::constant(1.0);
  s.competition = Kernel::tophat_height(1, 0.5, 1.0);
  s.dispersal = Kernel::tophat(1, 1.0);
  s.domain = SpatialDomain::torus(1, 10.0);
  MeanFieldScalingPlan plan;
  plan.base = make_params(s);
  plan.ladder = {20, 320};
  plan.replicates = 40;
  plan.horizon = 1.0;
  plan.grid_nodes = 128;
  const MeanFieldScalingReport rep = scaling_meanfield(plan);
  // uniform start: the mass solves the logistic equation m' = m - m^2 / L
  const double L = 10.0;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    const double m = L / (1.0 + (L - 1.0) * std::exp(-t));
    CHECK(rep.limit[0][i] == doctest::Approx(m).epsilon(1e-6));
  }
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.strictly_decreasing[0]);
  CHECK(rep.final_over_initial[0] < 0.5);

  MeanFieldScalingPlan bad = plan;
  bad.ladder = {100, 50};
  CHECK_THROWS_AS(scaling_meanfield(bad), BadConfig);
}

TEST_CASE("superprocess regime: finite-n bracket and drift sign") {
  SuperprocessPlan plan;
  plan.ladder = {10, 20};
  plan.replicates = 400;
  plan.horizon = 0.5;
  plan.seed = 2;
  const SuperprocessReport rep = scaling_superprocess(plan);
  REQUIRE(rep.rows.size() == 2);
  // a sample variance over R near-Gaussian replicates has relative SE sqrt(2 / R)
  const double band = 4.0 * std::sqrt(2.0 / static_cast<double>(plan.replicates));
  for (const auto& row : rep.rows) {
    CHECK(row.drift_nonincreasing);
    for (double r : row.finite_ratio) CHECK(std::abs(r - 1.0) < band);
  }
  const ModelParams p = superprocess_params(plan, 10);
  CHECK(p.gamma.constant_value() == 10.0);
  CHECK(p.mu.constant_value() == 10.0);
  CHECK(p.alpha.constant_value() == doctest::Approx(0.1));
  CHECK(p.dispersal.variance() == doctest::Approx(0.1));
}

TEST_CASE("reference targets and run bookkeeping") {
  const ModelParams p = reference_params(40.0);
  CHECK(carrying_capacity(p) == doctest::Approx(4.0));
  CHECK(p.domain.periodic());

  CountPlan cp;
  cp.setup.replicates = 20;
  cp.initial_counts = {60};
  cp.horizon = 4.0;
  cp.t_from = 2.0;
  cp.t_to = 4.0;
  const auto cr = count_run(cp);
  CHECK(cr.target == doctest::Approx(40.0));
  REQUIRE(cr.series.size() == 1);
  const auto& s = cr.series[0];
  CHECK(s.times.front() == 0.0);
  CHECK(s.mean.front() == doctest::Approx(60.0));  // all at the origin, inside the window
  CHECK(s.stderr_.front() == 0.0);
  // the exact time average lies between the extremes of the sampled series
  CHECK(s.time_average.mean > 0.0);
  CHECK(s.time_average.mean < 60.0);

  LoadPlan lp;
  lp.setup.replicates = 10;
  lp.horizon = 2.0;
  lp.t_from = 1.0;
  lp.t_to = 2.0;
  const auto lr = load_run(lp);
  CHECK(lr.target == doctest::Approx(160.0));
  CHECK(lr.mean.front() == doctest::Approx(1.0));  // a lone individual loads itself

  cp.t_to = 5.0;
  CHECK_THROWS_AS(count_run(cp), BadConfig);
}

TEST_CASE("density run conditions on survival") {
  DensityPlan dp;
  dp.setup.replicates = 30;
  dp.times = {1.0, 2.0};
  dp.judge_time = 2.0;
  const auto r = density_run(dp);
  CHECK(r.replicates == 30);
  CHECK(r.survivors <= 30);
  REQUIRE(r.histograms.size() == 2);
  CHECK(r.histograms[0].n_replicates == r.survivors);
  CHECK(r.histograms[0].edges.size() == 41);
  dp.judge_time = 3.0;
  CHECK_THROWS_AS(density_run(dp), BadConfig);
}

TEST_CASE("engines agree on small fleets") {
  EnginePlan ep;
  ep.replicates = 60;
  ep.horizon = 3.0;
  const auto r = engine_equivalence(ep);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.ks.p_value > 0.001);
    CHECK(row.faithful_mean > 0.0);
  }
}

TEST_CASE("martingale and moment suites on small fleets") {
  MartingalePlan mp;
  mp.setup.replicates = 400;
  const auto m = martingale_suite(mp);
  REQUIRE(m.rows.size() == 2);
  for (const auto& row : m.rows) {
    CHECK(std::abs(row.summary.mean) <= 4.0 * row.summary.stderr_);
    CHECK(row.summary.ratio == doctest::Approx(1.0).epsilon(4.0 * std::sqrt(2.0 / 400)));
  }

  MomentPlan op;
  op.setup.replicates = 400;
  op.times = {1.0};
  op.resamples = 200;
  const auto o = moment_suite(op);
  REQUIRE(o.rows.size() == 1);
  CHECK(o.rows[0].n_replicates == 400);
  op.times = {0.005};
  CHECK_THROWS_AS(moment_suite(op), BadConfig);
}

TEST_CASE("mean-field solver and equilibrium checks") {
  CHECK(logistic_solution(4.0, 4.0, 4.0, 3.0) == doctest::Approx(4.0));
  CHECK(logistic_solution(1.0, 4.0, 4.0, 0.0) == doctest::Approx(1.0));

  const auto s = solver_check({});
  MESSAGE("logistic error " << s.logistic_max_error << ", order ratio " << s.order_ratio
                            << ", decay ratio " << s.decay_worst_ratio);
  CHECK(s.logistic_ok);
  CHECK(s.order_ok);
  CHECK(s.decay_ok);
  CHECK(s.times.size() == s.closed_form.size());

  const auto f = fixed_point_check({});
  CHECK(f.f_ok);
  CHECK(f.hypotheses.pass);
  CHECK(f.converged);
  CHECK(f.contraction_ok);

  const auto d = decay_check({});
  CHECK(d.dbc.bound_holds);
  CHECK(d.dbc.monotone);
  CHECK(d.l2_ok);
  CHECK(d.pass);
}
