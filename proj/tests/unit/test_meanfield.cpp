#include <cmath>
#include <numbers>
#include <vector>

#include "bpdl/errors.hpp"
#include "bpdl/meanfield/equilibrium.hpp"
#include "bpdl/meanfield/solver.hpp"
#include "bpdl/params.hpp"
#include "bpdl/rng.hpp"
#include "doctest.h"

using namespace bpdl;
using namespace bpdl::meanfield;

namespace {

constexpr double kPi = std::numbers::pi;

Model reference_model(std::size_t n = 400, double side = 20.0,
                      ConvolutionMethod method = ConvolutionMethod::automatic) {
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, side)));
  return make_model(p, n, method);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double logistic(double n0, double r, double K, double t) {
  return K * n0 * std::exp(r * t) / (K + n0 * (std::exp(r * t) - 1.0));
}

DensityField wavy(const Grid& g, double base, double amp) {
  return DensityField::from_function(g, [&](const Point& x) {
    double v = 1.0;
    for (int a = 0; a < g.dim; ++a) v *= 1.0 + amp * std::sin(2.0 * kPi * x[a] / g.side);
    return base * v;
  });
}

// gamma = 3, mu = 1, alpha = 1, D ~ N(0, 1), U ~ N(0, 1/2) on L = 20
Model contraction_model() {
  return make_model(3.0, 1.0, 1.0, Kernel::gaussian(1, 1.0), Kernel::gaussian(1, 0.5),
                    Grid(1, 400, 20.0));
}

// mu = 0, D = U annulus 0.25..0.75 of unit mass, gamma = 2, alpha = 1/2
Model detailed_balance_model() {
  const Kernel k = Kernel::annulus(1, 0.25, 0.75);
  return make_model(2.0, 0.0, 0.5, k, k, Grid(1, 400, 20.0));
}

}  // namespace

TEST_CASE("stencils carry the exact kernel mass") {
  const Model m = reference_model();
  CHECK(std::abs(m.dispersal.raw_mass() - 1.0) < 1e-9);
  CHECK(std::abs(m.competition.raw_mass() - 1.0) < 1e-9);
  double s = 0.0;
  for (double w : m.competition.weights()) s += w;
  CHECK(std::abs(s - 1.0) < 1e-13);
  const Grid g2(2, 64, 10.0);
  const KernelStencil s2(Kernel::tophat(2, 1.0), g2);
  CHECK(std::abs(s2.raw_mass() - 1.0) < 1e-2);
  double t2 = 0.0;
  for (double w : s2.weights()) t2 += w;
  CHECK(std::abs(t2 - 1.0) < 1e-13);
  CHECK_THROWS_AS(KernelStencil(Kernel::lattice_nn(1), Grid(1, 16, 4.0)), BadKernel);
}

TEST_CASE("right-hand side on constant fields") {
  for (auto method : {ConvolutionMethod::direct, ConvolutionMethod::fft}) {
    const Model m = reference_model(400, 20.0, method);
    const double c0 = m.carrying_capacity();
    CHECK(c0 == 4.0);
    CHECK(max_abs(rhs(m, DensityField(m.grid, c0))) <= 1e-12);
    CHECK(max_abs(rhs(m, DensityField(m.grid, 0.0))) == 0.0);
    const double c = 2.5;
    const auto r = rhs(m, DensityField(m.grid, c));
    const double expect = (m.gamma - m.mu) * c - m.alpha * c * c;
    for (double v : r) CHECK(std::abs(v - expect) <= 1e-12);
  }
  const Model m2 = make_model(5.0, 1.0, 1.0, Kernel::tophat(2, 1.0), Kernel::gaussian(2, 0.3),
                              Grid(2, 48, 8.0));
  CHECK(max_abs(rhs(m2, DensityField(m2.grid, 4.0))) <= 1e-12);
}

TEST_CASE("direct and FFT convolution agree") {
  Rng rng(11);
  {
    const Grid g(1, 1024, 20.0);
    DensityField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) f[k] = 5.0 * rng.uniform();
    for (const Kernel& k : {Kernel::tophat(1, 3.0), Kernel::gaussian(1, 0.7),
                            Kernel::annulus(1, 0.25, 0.75)}) {
      const KernelStencil s(k, g);
      const auto a = convolve(s, f.values(), ConvolutionMethod::direct);
      const auto b = convolve(s, f.values(), ConvolutionMethod::fft);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
    }
  }
  {
    const Grid g(2, 40, 6.0);
    DensityField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) f[k] = rng.uniform();
    const KernelStencil s(Kernel::tophat(2, 1.0), g);
    const auto a = convolve(s, f.values(), ConvolutionMethod::direct);
    const auto b = convolve(s, f.values(), ConvolutionMethod::fft);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
  }
}

TEST_CASE("uniform field follows the logistic closed form") {
  const Model m = reference_model(200, 20.0);
  const auto res = integrate(m, DensityField(m.grid, 1.0), 2.0, 0.01);
  const double exact = logistic(1.0, 4.0, 4.0, 2.0);
  CHECK(std::abs(res.final_field.sup() - exact) <= 1e-6);
  CHECK(std::abs(res.final_field.inf() - exact) <= 1e-6);
  CHECK(std::abs(res.masses.back() / 20.0 - exact) <= 1e-6);
  CHECK(res.max_clip_fraction == 0.0);
}

TEST_CASE("Runge-Kutta error falls by about 16 when dt halves") {
  const Model m = reference_model(50, 20.0);
  const double exact = logistic(0.2, 4.0, 4.0, 2.0);
  const auto e1 = std::abs(integrate(m, DensityField(m.grid, 0.2), 2.0, 0.01).final_field[0] - exact);
  const auto e2 =
      std::abs(integrate(m, DensityField(m.grid, 0.2), 2.0, 0.005).final_field[0] - exact);
  MESSAGE("errors " << e1 << " " << e2);
  REQUIRE(e2 > 0.0);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("mass decays at least exponentially when mu exceeds gamma") {
  const Model m = make_model(1.0, 2.0, 1.0, Kernel::tophat(1, 3.0), Kernel::tophat_height(1, 0.5, 1.0),
                             Grid(1, 400, 20.0));
  const DensityField f0 = DensityField::from_function(
      m.grid, [](const Point& x) { return 3.0 * std::exp(-x[0] * x[0]) + 0.5; });
  std::vector<double> outs;
  for (int i = 1; i <= 40; ++i) outs.push_back(0.1 * i);
  const auto res = integrate(m, f0, 4.0, 0.01, outs);
  const double m0 = f0.mass();
  for (std::size_t i = 0; i < outs.size(); ++i) {
    CHECK(res.outputs[i].mass() <= m0 * std::exp(-outs[i]) * (1.0 + 1e-12));
  }
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    CHECK(res.masses[i] <= m0 * std::exp(-res.times[i]) * (1.0 + 1e-12));
  }
}

TEST_CASE("steps above the stability bound are refused") {
  const Model m = reference_model(100, 20.0);
  CHECK(stable_dt(m, DensityField(m.grid, 4.0)) == doctest::Approx(0.01));
  CHECK_THROWS_AS(integrate(m, DensityField(m.grid, 4.0), 1.0, 0.02), StepTooLarge);
  CHECK_THROWS_AS(integrate(m, DensityField(m.grid, 4.0), 1.0, 0.0), BadConfig);
}

TEST_CASE("Picard scheme agrees with Runge-Kutta") {
  struct Case {
    Model model;
    DensityField start;
  };
  std::vector<Case> cases;
  {
    const Model m = reference_model(200, 20.0);
    cases.push_back({m, DensityField(m.grid, 1.0)});
  }
  {
    const Model m = reference_model(200, 20.0);
    cases.push_back({m, wavy(m.grid, 2.0, 0.5)});
  }
  {
    const Model m = contraction_model();
    cases.push_back({m, DensityField::from_function(m.grid, [](const Point& x) {
                       return 0.5 + 3.0 * std::exp(-x[0] * x[0]);
                     })});
  }
  {
    const Model m = detailed_balance_model();
    cases.push_back({m, wavy(m.grid, 4.0, 0.5)});
  }
  for (const auto& c : cases) {
    const auto rk = integrate(c.model, c.start, 0.5, 0.001).final_field;
    const auto pic = picard_iterate(c.model, c.start, 0.5, 8);
    const double diff = rk.sup_distance(pic.field);
    MESSAGE("picard vs rk4 " << diff);
    CHECK(diff <= 1e-5);
    CHECK(pic.max_growth_ratio <= 1.0 + 1e-12);
  }
  const Model m = reference_model(200, 20.0);
  const auto logistic_run = picard_iterate(m, DensityField(m.grid, 1.0), 0.5, 8);
  CHECK(std::abs(logistic_run.field[0] - logistic(1.0, 4.0, 4.0, 0.5)) <= 1e-5);
  const auto fixed = picard_iterate(m, DensityField(m.grid, 4.0), 0.5, 8);
  CHECK(fixed.field.sup_distance(4.0) <= 1e-10);
}

TEST_CASE("the F map") {
  const Model m = reference_model(400, 20.0);
  const double c0 = m.carrying_capacity();
  CHECK(apply_F(m, DensityField(m.grid, c0)).sup_distance(c0) <= 1e-13);
  CHECK(apply_F(m, DensityField(m.grid, 0.0)).sup() == 0.0);
  const double expect = 2.0 * m.gamma * c0 / (m.mu + 2.0 * m.alpha * c0);
  const auto f2 = apply_F(m, DensityField(m.grid, 2.0 * c0));
  CHECK(f2.sup_distance(expect) <= 1e-12);
  CHECK(expect < 2.0 * c0);
  Rng rng(3);
  DensityField f(m.grid);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = 8.0 * rng.uniform();
  CHECK(apply_F(m, f).inf() >= 0.0);

  const Model no_death = detailed_balance_model();
  CHECK_THROWS_AS(apply_F(no_death, DensityField(no_death.grid, 0.0)), PoleAtZero);
}

TEST_CASE("fixed-point iteration contracts to the carrying capacity") {
  const Model m = contraction_model();
  const double c0 = m.carrying_capacity();
  const auto hyp = check_uniqueness_hypotheses(m, Kernel::gaussian(1, 1.0), Kernel::gaussian(1, 0.5));
  CHECK(hyp.pass);
  const auto res = fixed_point(m, wavy(m.grid, c0, 0.3), 1e-12, 500);
  CHECK(res.field.sup_distance(c0) < 1e-10);
  CHECK(res.iterations > 0);
  REQUIRE(res.contraction.size() == res.contraction_bound.size());
  for (std::size_t k = 0; k < res.contraction.size(); ++k) {
    if (res.distance_to_c0[k] < 1e-9) break;  // rounding dominates
    CHECK(res.contraction[k] <= res.contraction_bound[k] + 1e-12);
  }
  CHECK(fixed_point(m, DensityField(m.grid, 0.0), 1e-12, 10).field.sup() == 0.0);
  CHECK(fixed_point(m, DensityField(m.grid, c0), 1e-12, 10).iterations == 0);
  CHECK_THROWS_AS(fixed_point(m, wavy(m.grid, c0, 0.3), 1e-14, 2), NoConvergence);
}

TEST_CASE("Assumption C examples") {
  const Model ref = reference_model();
  const auto fail = check_assumption_C(ref, Kernel::tophat(1, 3.0), Kernel::tophat_height(1, 0.5, 1.0));
  CHECK_FALSE(fail.pass);
  CHECK_FALSE(fail.pointwise_ok);
  CHECK(fail.pointwise_margin == doctest::Approx(5.0 / 6.0 - 4.0));

  const Kernel g = Kernel::gaussian(1, 0.8);
  const Model same = make_model(3.0, 1.0, 1.0, g, g, Grid(1, 200, 20.0));
  const auto pass = check_assumption_C(same, g, g);
  CHECK(pass.pass);
  CHECK(pass.pointwise_margin >= 0.0);
  CHECK(std::abs(pass.r_mass - 1.0) <= 1e-6);

  const auto c = check_assumption_C(contraction_model(), Kernel::gaussian(1, 1.0),
                                    Kernel::gaussian(1, 0.5));
  CHECK(c.pass);
  CHECK(std::abs(c.r_mass - 1.0) <= 1e-6);

  const Kernel a = Kernel::annulus(1, 0.25, 0.75);
  const auto u = check_uniqueness_hypotheses(detailed_balance_model(), a, a);
  CHECK(u.assumption_c.pass);
  CHECK_FALSE(u.dispersal_nonincreasing);
  CHECK_FALSE(u.pass);
}

TEST_CASE("squared distance to the carrying capacity decays") {
  const Kernel g = Kernel::gaussian(1, 0.5);
  const Model m = make_model(3.0, 1.0, 1.0, g, g, Grid(1, 400, 20.0));
  const double c0 = m.carrying_capacity();
  const DensityField f0 = DensityField::from_function(
      m.grid, [&](const Point& x) { return c0 + 0.5 * std::exp(-x[0] * x[0]); });
  const auto rep = l2_decay_check(m, f0, 5.0, 0.01);
  CHECK(rep.nonincreasing);
  CHECK(rep.r2 > 0.95);
  CHECK(rep.rate > 0.0);
  CHECK(rep.l2.back() < rep.l2.front());
  const auto flat = l2_decay_check(m, DensityField(m.grid, c0), 1.0, 0.01);
  CHECK(flat.trivial);
  for (double e : flat.l2) CHECK(e == 0.0);
}

TEST_CASE("detailed-balance pointwise bound and monotone approach") {
  const Model m = detailed_balance_model();
  const auto rep = dbc_bound_check(m, wavy(m.grid, 4.0, 0.5), 5.0, 0.01);
  CHECK(rep.bound_holds);
  CHECK(rep.monotone);
  CHECK(rep.worst_ratio <= 1.0 + 1e-9);
  CHECK(rep.checks == 50u * 400u);
  CHECK_THROWS_AS(dbc_bound_check(contraction_model(), wavy(m.grid, 2.0, 0.5), 1.0, 0.01),
                  BadConfig);
}
