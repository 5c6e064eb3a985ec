#include <cmath>
#include <vector>

#include "bpdl/errors.hpp"
#include "bpdl/params.hpp"
#include "bpdl/reference.hpp"
#include "bpdl/sim/fleet.hpp"
#include "bpdl/sim/simulator.hpp"
#include "bpdl/sim/sum_tree.hpp"
#include "bpdl/stats/hypothesis.hpp"
#include "doctest.h"

using namespace bpdl;
using namespace bpdl::sim;

namespace {

Point pt(double x) {
  Point p{};
  p[0] = x;
  return p;
}

SimOptions engine(EngineKind k) {
  SimOptions o;
  o.engine = k;
  return o;
}

ModelParams reference(double side = 40.0) {
  return make_params(reference_spec(SpatialDomain::torus(1, side)));
}

}  // namespace

TEST_CASE("sum tree selection and totals") {
  SumTree t;
  for (int i = 0; i < 37; ++i) t.push_back(static_cast<double>(i % 5));
  double total = 0.0;
  for (int i = 0; i < 37; ++i) total += i % 5;
  CHECK(t.total() == total);
  // every target lands on the leaf whose prefix interval contains it
  double prefix = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.get(i) > 0.0) {
      CHECK(t.find(prefix) == i);
      CHECK(t.find(prefix + 0.5 * t.get(i)) == i);
    }
    prefix += t.get(i);
  }
  t.set(3, 10.0);
  t.pop_back();
  CHECK(t.size() == 36);
  CHECK(t.find(t.total() * (1.0 - 1e-16)) < 36);
}

TEST_CASE("envelope rates") {
  const ModelParams p = reference();
  CHECK(Simulator(p, Population::repeated(1, pt(0.0), 1), Rng(1)).event_rates().birth == 5.0);
  const Simulator one(p, Population::repeated(1, pt(0.0), 1), Rng(1));
  CHECK(one.event_rates().natural_death == 1.0);
  CHECK(one.event_rates().competition_death == 1.0);
  const Simulator three(p, Population(1, {pt(0.0), pt(1.0), pt(5.0)}), Rng(1));
  CHECK(three.event_rates().birth == 15.0);
  CHECK(three.event_rates().natural_death == 3.0);
  CHECK(three.event_rates().competition_death == 9.0);
  const Simulator none(p, Population(1), Rng(1));
  CHECK(none.event_rates().total() == 0.0);
}

TEST_CASE("step on an empty population throws") {
  Simulator s(reference(), Population(1), Rng(1));
  CHECK_THROWS_AS(s.step(), EmptyPopulation);
  const Trace tr = s.run(Horizon::until_time(5.0), SnapshotSchedule::at({1.0, 2.0}));
  CHECK(tr.extinct);
  CHECK(tr.snapshots.size() == 2);
  CHECK(tr.snapshots[1].count == 0);
}

TEST_CASE("saturated thinning has no fictitious events") {
  ParamSpec s = reference_spec(SpatialDomain::torus(1, 10.0));
  s.competition = Kernel::tophat_height(1, 100.0, 1.0);  // U == 1 on the whole torus
  s.alpha = RateField::constant(0.05);
  const ModelParams p = make_params(s);
  Simulator sim(p, Population::repeated(1, pt(0.0), 10), Rng(4), engine(EngineKind::faithful));
  for (int k = 0; k < 10000 && !sim.population().empty(); ++k) sim.step();
  CHECK(sim.counters().fictitious == 0);
  CHECK(sim.counters().total() > 1000);
}

TEST_CASE("constant-rate class frequencies match the rate split") {
  ParamSpec s = reference_spec(SpatialDomain::torus(1, 10.0));
  s.competition = Kernel::tophat_height(1, 100.0, 1.0);
  const ModelParams p = make_params(s);
  for (EngineKind kind : {EngineKind::faithful, EngineKind::indexed}) {
    Simulator sim(p, Population::repeated(1, pt(0.0), 4), Rng(8), engine(kind));
    double eb = 0.0, en = 0.0, ec = 0.0, vb = 0.0, vc = 0.0;
    for (int k = 0; k < 20000 && !sim.population().empty(); ++k) {
      const double n = static_cast<double>(sim.population().size());
      const double tot = 5.0 * n + n + n * n;
      const double pb = 5.0 * n / tot, pn = n / tot, pc = n * n / tot;
      eb += pb;
      en += pn;
      ec += pc;
      vb += pb * (1.0 - pb);
      vc += pc * (1.0 - pc);
      sim.step();
    }
    const auto& c = sim.counters();
    CHECK(std::abs(static_cast<double>(c.births) - eb) < 3.0 * std::sqrt(vb));
    CHECK(std::abs(static_cast<double>(c.competition_deaths) - ec) < 3.0 * std::sqrt(vc));
    CHECK(static_cast<double>(c.natural_deaths) > 0.5 * en);
  }
}

TEST_CASE("single individual branch probabilities") {
  const ModelParams p = reference();
  for (EngineKind kind : {EngineKind::faithful, EngineKind::indexed}) {
    const int reps = 20000;
    int births = 0;
    for (int r = 0; r < reps; ++r) {
      Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(77, r), engine(kind));
      Event e;
      do {
        e = s.step();
      } while (e.kind == EventKind::fictitious);
      births += e.kind == EventKind::birth;
    }
    const double phat = static_cast<double>(births) / reps;
    const double q = 5.0 / 7.0;
    CHECK(std::abs(phat - q) < 3.0 * std::sqrt(q * (1.0 - q) / reps));
  }
  // with one individual the exact rates coincide with the envelope rates
  const Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng(1), engine(EngineKind::indexed));
  CHECK(s.exact_rates().birth == s.event_rates().birth);
  CHECK(s.exact_rates().natural_death == s.event_rates().natural_death);
  CHECK(s.exact_rates().competition_death == s.event_rates().competition_death);
}

TEST_CASE("pure death: extinction time and mean count") {
  ParamSpec spec = reference_spec(SpatialDomain::torus(1, 10.0));
  spec.gamma = RateField::constant(0.0);
  spec.alpha = RateField::constant(0.0);
  const ModelParams p = make_params(spec);
  const int reps = 10000;
  std::vector<double> times, at1;
  for (int r = 0; r < reps; ++r) {
    Simulator s(p, Population(1, {pt(0.0), pt(2.0), pt(4.0)}), Rng::stream(31, r),
                engine(r % 2 ? EngineKind::faithful : EngineKind::indexed));
    std::size_t last = 3;
    const Trace tr = s.run(Horizon::until_extinct(), SnapshotSchedule::at({1.0}));
    REQUIRE(tr.extinct);
    REQUIRE(tr.counters.births == 0);
    REQUIRE(tr.snapshots.size() == 1);
    REQUIRE(tr.snapshots[0].count <= last);
    times.push_back(tr.extinction_time);
    at1.push_back(static_cast<double>(tr.snapshots[0].count));
  }
  const auto st = stats::summarize(times);
  CHECK(std::abs(st.mean - 11.0 / 6.0) < 3.0 * st.stderr_);
  const auto sc = stats::summarize(at1);
  CHECK(std::abs(sc.mean - 3.0 * std::exp(-1.0)) < 3.0 * sc.stderr_);
}

TEST_CASE("indexed cache survives many events in every domain mode") {
  struct Case {
    const char* name;
    ParamSpec spec;
    Population init;
  };
  std::vector<Case> cases;
  cases.push_back({"torus", reference_spec(SpatialDomain::torus(1, 12.0)),
                   Population::repeated(1, pt(0.0), 5)});
  cases.push_back({"box", reference_spec(SpatialDomain::box(1, -4.0, 4.0)),
                   Population::repeated(1, pt(0.0), 5)});
  cases.push_back({"unbounded", reference_spec(SpatialDomain::unbounded(1)),
                   Population::repeated(1, pt(0.0), 5)});
  {
    ParamSpec g = reference_spec(SpatialDomain::torus(1, 10.0));
    g.competition = Kernel::gaussian(1, 0.3, 1.0);
    g.gamma = RateField::function([](const Point& x) { return 4.0 + std::cos(x[0]); }, 5.0);
    g.mu = RateField::tabulated({-5.0, 5.0}, {0.5, 1.5});
    cases.push_back({"gaussian", g, Population::repeated(1, pt(0.0), 5)});
  }
  {
    ParamSpec l;
    l.domain = SpatialDomain::lattice(1);
    l.gamma = RateField::constant(13.0);
    l.mu = RateField::constant(1.0);
    l.alpha = RateField::constant(2.0);
    l.competition = Kernel::lattice_point(1);
    l.dispersal = Kernel::lattice_nn(1);
    cases.push_back({"lattice", l, Population::repeated(1, pt(0.0), 1)});
  }
  {
    ParamSpec t = reference_spec(SpatialDomain::torus(2, 6.0));
    t.competition = Kernel::tophat_height(2, 0.5, 1.0);
    t.dispersal = Kernel::tophat(2, 1.0);
    Point o{};
    cases.push_back({"torus2d", t, Population::repeated(2, o, 5)});
  }
  for (const Case& c : cases) {
    INFO(c.name);
    SimOptions o = engine(EngineKind::indexed);
    o.debug_validate = true;
    Simulator s(make_params(c.spec), c.init, Rng(12), o);
    for (int k = 0; k < 3000 && !s.population().empty(); ++k) s.step();
    CHECK_NOTHROW(s.validate_index());
    const auto& cnt = s.counters();
    CHECK(s.population().size() ==
          c.init.size() + cnt.births - cnt.natural_deaths - cnt.competition_deaths);
    const ModelParams& p = s.params();
    if (p.alpha.is_constant()) {
      CHECK(s.exact_rates().competition_death ==
            doctest::Approx(p.alpha.constant_value() * total_interaction(s.population(), p))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("box mode counts lost seeds") {
  const ModelParams p = make_params(reference_spec(SpatialDomain::box(1, -1.0, 1.0)));
  Simulator s(p, Population::repeated(1, pt(0.0), 3), Rng(5), engine(EngineKind::indexed));
  for (int k = 0; k < 2000 && !s.population().empty(); ++k) s.step();
  CHECK(s.counters().lost_seeds > 0);
  for (const Point& x : s.population().positions()) CHECK(p.domain.contains(x));
}

TEST_CASE("runs are deterministic in the seed") {
  const ModelParams p = reference();
  for (EngineKind kind : {EngineKind::faithful, EngineKind::indexed, EngineKind::automatic}) {
    auto once = [&] {
      Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(9, 3), engine(kind));
      return s.run(Horizon::until_time(5.0), SnapshotSchedule::every(0.5, 5.0, true));
    };
    const Trace a = once();
    const Trace b = once();
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
      CHECK(a.snapshots[k].coords == b.snapshots[k].coords);
      CHECK(a.snapshots[k].counters == b.snapshots[k].counters);
    }
    CHECK(a.final_time == b.final_time);
  }
}

TEST_CASE("event cap guards against explosion") {
  ParamSpec spec = reference_spec(SpatialDomain::torus(1, 10.0));
  spec.alpha = RateField::constant(0.0);
  SimOptions o = engine(EngineKind::indexed);
  o.event_cap = 500;
  Simulator s(make_params(spec), Population::repeated(1, pt(0.0), 1), Rng(2), o);
  CHECK_THROWS_AS(s.run(Horizon::until_time(100.0)), BudgetExceeded);
}

TEST_CASE("horizons and snapshots") {
  const ModelParams p = reference();
  Simulator s(p, Population::repeated(1, pt(0.0), 10), Rng(6), engine(EngineKind::indexed));
  const Trace tr = s.run(Horizon::until_events(100), SnapshotSchedule::every(0.01, 1000.0));
  CHECK(tr.events == 100);
  CHECK(tr.snapshots.back().t <= s.time());
  Simulator s2(p, Population::repeated(1, pt(0.0), 10), Rng(6), engine(EngineKind::indexed));
  const Trace tr2 = s2.run(Horizon::until_time(2.0), SnapshotSchedule::every(0.5, 2.0));
  CHECK(tr2.snapshots.size() == 5);
  CHECK(s2.time() == 2.0);
  CHECK(tr2.at(1.5).t == 1.5);
  CHECK_THROWS_AS(tr2.at(1.25), NoSnapshot);
}

TEST_CASE("continuous dispersal keeps atoms simple") {
  const ModelParams p = reference();
  Simulator s(p, Population(1, {pt(0.0), pt(0.7)}), Rng(21));
  const Trace tr = s.run(Horizon::until_time(10.0), SnapshotSchedule::every(1.0, 10.0, true));
  for (const Snapshot& snap : tr.snapshots) {
    if (snap.count > 0) CHECK(multiplicity_check(snap.population(1)) == 1);
  }
}

TEST_CASE("subcritical linear regime dies out") {
  ParamSpec spec = reference_spec(SpatialDomain::torus(1, 40.0));
  spec.gamma = RateField::constant(1.0);
  spec.mu = RateField::constant(2.0);
  const ModelParams p = make_params(spec);
  const auto extinct = run_fleet(200, 0, [&](std::size_t id) {
    Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(100, id));
    return s.run(Horizon::until_time(100.0)).extinct ? 1 : 0;
  });
  int all = 0;
  for (int e : extinct) all += e;
  CHECK(all == 200);
}

TEST_CASE("fleet results do not depend on the thread count") {
  const ModelParams p = reference();
  auto fn = [&](std::size_t id) {
    Simulator s(p, Population::repeated(1, pt(0.0), 1), Rng::stream(5, id));
    return s.run(Horizon::until_time(3.0)).snapshots.size() +
           s.population().size() * 1000;
  };
  CHECK(run_fleet(16, 1, fn) == run_fleet(16, 4, fn));
}
