#include <cmath>
#include <vector>

#include "bpdl/errors.hpp"
#include "bpdl/params.hpp"
#include "bpdl/reference.hpp"
#include "bpdl/sim/fleet.hpp"
#include "bpdl/sim/simulator.hpp"
#include "bpdl/stats/estimators.hpp"
#include "bpdl/stats/martingale.hpp"
#include "doctest.h"

using namespace bpdl;
using namespace bpdl::sim;
using namespace bpdl::stats;

namespace {

Point pt(double x) {
  Point p{};
  p[0] = x;
  return p;
}

ModelParams rates(double g, double m, double a, const SpatialDomain& dom) {
  ParamSpec s = reference_spec(dom);
  s.gamma = RateField::constant(g);
  s.mu = RateField::constant(m);
  s.alpha = RateField::constant(a);
  return make_params(s);
}

// A trace holding one snapshot per configuration, at t = 0.
Trace synthetic(const Population& pop) {
  Trace tr;
  tr.dim = pop.dim();
  Snapshot s;
  s.count = pop.size();
  s.coords = pop.flatten();
  tr.snapshots.push_back(s);
  return tr;
}

std::vector<Trace> poisson_traces(const SpatialDomain& dom, double intensity, std::size_t n,
                                  std::uint64_t seed) {
  std::vector<Trace> out;
  for (std::size_t r = 0; r < n; ++r) {
    Rng rng = Rng::stream(seed, r);
    out.push_back(synthetic(poisson_configuration(dom, intensity, rng)));
  }
  return out;
}

// Standard error of a sample variance from the fourth central moment.
double variance_se(const std::vector<double>& xs) {
  const Summary s = summarize(xs);
  double m4 = 0.0;
  for (double x : xs) m4 += std::pow(x - s.mean, 4);
  m4 /= static_cast<double>(xs.size());
  return std::sqrt(std::max(0.0, m4 - s.variance * s.variance) / static_cast<double>(xs.size()));
}

// Recomputes the martingale integrands from scratch at every stretch of
// constant population: the oracle for the incremental observer.
class BruteMartingale : public Observer {
 public:
  BruteMartingale(const ModelParams& p, TestFunction f) : p_(p), f_(std::move(f)) {}
  void on_start(const Simulator& s) override { nu0_ = nu_f(s.population()); }
  void advance(const Simulator& s, double t0, double t1) override {
    const auto& pop = s.population();
    double drift = 0.0, br = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const Point& x = pop[i];
      const double fx = f_(x);
      const double load = competition_sum(pop, x, p_);
      const double kill = p_.mu(x) + p_.alpha(x) * load;
      drift += p_.gamma(x) * f_.smoothed(p_.dispersal, x, p_.domain, 1) - fx * kill;
      br += p_.gamma(x) * f_.smoothed(p_.dispersal, x, p_.domain, 2) + fx * fx * kill;
    }
    comp_ += (t1 - t0) * drift;
    bracket_ += (t1 - t0) * br;
  }
  double martingale(const Population& pop) const { return nu_f(pop) - nu0_ - comp_; }
  double bracket() const { return bracket_; }

 private:
  double nu_f(const Population& pop) const {
    double s = 0.0;
    for (const Point& x : pop.positions()) s += f_(x);
    return s;
  }
  ModelParams p_;
  TestFunction f_;
  double nu0_ = 0.0, comp_ = 0.0, bracket_ = 0.0;
};

class Both : public Observer {
 public:
  Both(Observer& a, Observer& b) : a_(a), b_(b) {}
  void on_start(const Simulator& s) override { a_.on_start(s), b_.on_start(s); }
  void advance(const Simulator& s, double t0, double t1) override {
    a_.advance(s, t0, t1), b_.advance(s, t0, t1);
  }
  void before_event(const Simulator& s, const Event& e) override {
    a_.before_event(s, e), b_.before_event(s, e);
  }
  void after_event(const Simulator& s, const Event& e) override {
    a_.after_event(s, e), b_.after_event(s, e);
  }

 private:
  Observer& a_;
  Observer& b_;
};

}  // namespace

TEST_CASE("pure-death mean count") {
  const ModelParams p = rates(0.0, 1.0, 0.0, SpatialDomain::torus(1, 20.0));
  const auto traces = run_fleet(10000, 0, [&](std::size_t r) {
    Simulator s(p, Population(1, {pt(0.0), pt(1.0), pt(2.0)}), Rng::stream(5, r));
    return s.run(Horizon::until_time(2.0), SnapshotSchedule::at({0.0, 1.0, 2.0}));
  });
  const EnsembleStat e0 = estimate_count(traces, 0.0);
  CHECK(e0.mean == 3.0);
  CHECK(e0.variance == 0.0);
  for (double t : {1.0, 2.0}) {
    const EnsembleStat e = estimate_count(traces, t);
    CHECK(e.n_replicates == 10000u);
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(e.variance / 10000.0)));
    CHECK(std::abs(e.mean - 3.0 * std::exp(-t)) <= 3.0 * e.stderr_);
  }
  CHECK_THROWS_AS(estimate_count(traces, 0.5), NoSnapshot);
  CHECK_THROWS_AS(estimate_count({traces[0]}, 1.0), BadConfig);
}

TEST_CASE("count inside a window") {
  const SpatialDomain torus = SpatialDomain::torus(1, 20.0);
  const auto traces = poisson_traces(torus, 4.0, 2000, 8);
  const EnsembleStat e = estimate_count(traces, 0.0, SpatialDomain::box(1, -5.0, 5.0));
  CHECK(std::abs(e.mean - 40.0) <= 3.0 * e.stderr_);
  CHECK(std::abs(e.variance / e.mean - 1.0) < 0.1);
}

TEST_CASE("covariance measure of Poisson configurations vanishes") {
  const SpatialDomain torus = SpatialDomain::torus(1, 10.0);
  const auto traces = poisson_traces(torus, 4.0, 10000, 21);
  const CovarianceEstimate c =
      covariance_measure(traces, 0.0, torus, {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0});
  CHECK(c.intensity == doctest::Approx(4.0).epsilon(0.01));
  CHECK(c.volume == 10.0);
  for (std::size_t k = 0; k < c.value.size(); ++k) {
    CHECK(c.stderr_[k] > 0.0);
    CHECK(std::abs(c.value[k]) <= 3.0 * c.stderr_[k]);
  }
}

TEST_CASE("covariance measure counts both ordered pairs") {
  const SpatialDomain torus = SpatialDomain::torus(1, 10.0);
  const Population two(1, {pt(0.0), pt(0.3)});
  const std::vector<Trace> traces{synthetic(two), synthetic(two)};
  const CovarianceEstimate c = covariance_measure(traces, 0.0, torus, {0.0, 0.5});
  const double v = 10.0;
  // 2 / V from the pairs, minus n^2 int phi with n = 2 / V and int phi = 1
  CHECK(c.value[0] == doctest::Approx(2.0 / v - (2.0 / v) * (2.0 / v) * 1.0));
  CHECK(c.stderr_[0] == 0.0);
  // minimal image: 4.9 and -4.9 are 0.2 apart on a torus of side 10
  const Population wrap(1, {pt(4.9), pt(-4.9)});
  const std::vector<Trace> w{synthetic(wrap), synthetic(wrap)};
  CHECK(covariance_measure(w, 0.0, torus, {0.0, 0.5}).value[0] == doctest::Approx(c.value[0]));
  CHECK_THROWS_AS(covariance_measure(traces, 0.0, SpatialDomain::box(1, 0.0, 1.0), {0.0, 1.0}),
                  BadConfig);
}

TEST_CASE("density histogram") {
  const SpatialDomain torus = SpatialDomain::torus(1, 20.0);
  const auto traces = poisson_traces(torus, 4.0, 10000, 13);
  std::vector<double> edges;
  for (int k = -5; k <= 5; ++k) edges.push_back(static_cast<double>(k));
  const Histogram h = density_histogram(traces, 0.0, edges);
  REQUIRE(h.intensity.size() == 10u);
  for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(h.intensity[k] - 4.0) <= 3.0 * h.stderr_[k]);
}

TEST_CASE("interaction load includes self pairs") {
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, 40.0)));
  CHECK(interaction_load(Population(1), p, 5.0) == 0.0);
  CHECK(interaction_load(Population(1, {pt(0.0), pt(0.3)}), p, 5.0) == 4.0);
  // the far point is outside the window but still counts as a partner
  CHECK(interaction_load(Population(1, {pt(4.9), pt(5.2)}), p, 5.0) == 2.0);
}

TEST_CASE("incremental martingale matches brute-force recomputation") {
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, 20.0)));
  for (auto kind : {EngineKind::faithful, EngineKind::indexed}) {
    const TestFunction f = TestFunction::triangle(0.5, 2.0);
    MartingaleObserver inc(p, {f, TestFunction::constant(1.0)});
    BruteMartingale brute(p, f);
    Both both(inc, brute);
    SimOptions o;
    o.engine = kind;
    Simulator s(p, Population::repeated(1, pt(0.0), 3), Rng(17), o);
    s.run(Horizon::until_time(3.0), {}, &both);
    CHECK(inc.martingale(0) == doctest::Approx(brute.martingale(s.population())).epsilon(1e-9));
    CHECK(inc.bracket(0) == doctest::Approx(brute.bracket()).epsilon(1e-9));
    CHECK(inc.value(1) == static_cast<double>(s.population().size()));
  }
}

TEST_CASE("martingale of f = 0 is identically zero") {
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, 20.0)));
  const auto traces = run_fleet(20, 0, [&](std::size_t r) {
    MartingaleObserver obs(p, {TestFunction::constant(0.0)});
    Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(3, r));
    return s.run(Horizon::until_time(1.0), SnapshotSchedule::at({1.0}), &obs);
  });
  const MartingaleSummary m = martingale_residual(traces, 1.0);
  CHECK(m.mean == 0.0);
  CHECK(m.variance == 0.0);
  CHECK(std::isnan(m.ratio));
}

TEST_CASE("Yule process martingale variance") {
  const double g = 1.0, t = 1.0;
  const std::size_t n0 = 5;
  const ModelParams p = rates(g, 0.0, 0.0, SpatialDomain::torus(1, 20.0));
  const std::size_t reps = 10000;
  const auto traces = run_fleet(reps, 0, [&](std::size_t r) {
    MartingaleObserver obs(p, {TestFunction::constant(1.0)});
    Simulator s(p, Population::repeated(1, pt(0.0), n0), Rng::stream(41, r));
    return s.run(Horizon::until_time(t), SnapshotSchedule::at({t}), &obs);
  });
  const MartingaleSummary m = martingale_residual(traces, t);
  std::vector<double> ms;
  for (const auto& tr : traces) ms.push_back(tr.at(t).observables[1]);
  const double expect = static_cast<double>(n0) * (std::exp(g * t) - 1.0);
  CHECK(std::abs(m.mean) <= 3.0 * m.stderr_);
  CHECK(std::abs(m.variance - expect) <= 3.0 * variance_se(ms));
  CHECK(m.mean_bracket == doctest::Approx(expect).epsilon(0.03));
  // M_t = N_t - N_0 - gamma int N
  for (const auto& tr : traces) {
    const auto& o = tr.at(t).observables;
    CHECK(o[0] == static_cast<double>(tr.at(t).count));
  }
}

TEST_CASE("reference martingale bracket ratio") {
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, 40.0)));
  const auto traces = run_fleet(2000, 0, [&](std::size_t r) {
    MartingaleObserver obs(p, {TestFunction::constant(1.0), TestFunction::indicator(-1.0, 1.0)});
    Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(99, r));
    return s.run(Horizon::until_time(2.0), SnapshotSchedule::at({2.0}), &obs);
  });
  for (std::size_t k : {0u, 1u}) {
    const MartingaleSummary m = martingale_residual(traces, 2.0, k);
    CHECK(std::abs(m.mean) <= 3.0 * m.stderr_);
    CHECK(m.ratio > 0.8);
    CHECK(m.ratio < 1.2);
  }
}

TEST_CASE("moment equation without competition") {
  const double g = 2.0, mu = 1.0, t = 1.0, dt = 0.01;
  const SpatialDomain torus = SpatialDomain::torus(1, 20.0);
  const ModelParams p = rates(g, mu, 0.0, torus);
  const auto traces = run_fleet(4000, 0, [&](std::size_t r) {
    Simulator s(p, Population::repeated(1, pt(0.0), 4), Rng::stream(61, r));
    return s.run(Horizon::until_time(t + dt), SnapshotSchedule::at({t - dt, t, t + dt}, true));
  });
  const MomentResidual m = moment_residual(traces, t, dt, p);
  CHECK(m.ci.contains(0.0));
  const double n_exact = 4.0 * std::exp((g - mu) * t) / 20.0;
  const EnsembleStat e = estimate_count(traces, t);
  CHECK(std::abs(m.intensity - n_exact) <= 3.0 * e.stderr_ / 20.0);
  CHECK(m.rhs == doctest::Approx((g - mu) * m.intensity));

  std::vector<Trace> empty(3);
  for (auto& tr : empty) {
    for (double s : {t - dt, t, t + dt}) {
      Snapshot snap;
      snap.t = s;
      tr.snapshots.push_back(snap);
    }
  }
  const MomentResidual z = moment_residual(empty, t, dt, p);
  CHECK(z.residual == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.ci.lo == 0.0);
  CHECK(z.ci.hi == 0.0);
}

TEST_CASE("moment equation with competition") {
  const double t = 1.0, dt = 0.01;
  const ModelParams p = make_params(reference_spec(SpatialDomain::torus(1, 40.0)));
  const auto traces = run_fleet(3000, 0, [&](std::size_t r) {
    Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(62, r));
    return s.run(Horizon::until_time(t + dt), SnapshotSchedule::at({t - dt, t, t + dt}, true));
  });
  const MomentResidual m = moment_residual(traces, t, dt, p);
  MESSAGE("residual " << m.residual << " ci [" << m.ci.lo << ", " << m.ci.hi << "]");
  CHECK(m.ci.contains(0.0));
  CHECK(m.covariance_u != 0.0);
}

TEST_CASE("estimators are pure functions of the traces") {
  const SpatialDomain torus = SpatialDomain::torus(1, 10.0);
  const auto traces = poisson_traces(torus, 4.0, 50, 2);
  const auto a = covariance_measure(traces, 0.0, torus, {0.0, 0.5, 1.0});
  const auto b = covariance_measure(traces, 0.0, torus, {0.0, 0.5, 1.0});
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
}
