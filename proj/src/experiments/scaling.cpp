#include "bpdl/experiments/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "bpdl/errors.hpp"
#include "bpdl/meanfield/solver.hpp"
#include "bpdl/sim/fleet.hpp"
#include "bpdl/stats/functionals.hpp"
#include "bpdl/stats/hypothesis.hpp"
#include "bpdl/stats/martingale.hpp"

namespace bpdl::experiments {

namespace {

void check_ladder(const std::vector<std::size_t>& ladder) {
  if (ladder.empty() || ladder.front() == 0) throw BadConfig("scaling ladder must be nonempty and positive");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) throw BadConfig("scaling ladder must be strictly increasing");
  }
}

// Distinct replicate streams for every rung of a ladder.
Rng rung_stream(std::uint64_t seed, std::size_t n, std::size_t id) {
  return Rng::stream(seed, (static_cast<std::uint64_t>(n) << 32) | id);
}

TestFunction squared(const TestFunction& f) {
  if (f.kind() == TestFunction::Kind::constant) {
    const double c = f(Point{});
    return TestFunction::constant(c * c);
  }
  return TestFunction::custom(
      [f](const Point& x) {
        const double v = f(x);
        return v * v;
      },
      f.name() + "^2", f.breakpoints());
}

}  // namespace

MeanFieldScalingReport scaling_meanfield(const MeanFieldScalingPlan& plan) {
  check_ladder(plan.ladder);
  const ModelParams& base = plan.base;
  if (!base.domain.periodic()) throw BadConfig("mean-field scaling runs on a torus");
  if (!base.constant_rates()) throw BadConfig("mean-field scaling needs constant rates");
  if (plan.replicates < 2) throw BadConfig("mean-field scaling needs at least two replicates");
  if (!(plan.initial_mass > 0.0)) throw BadConfig("initial mass must be positive");

  MeanFieldScalingReport rep;
  rep.times = sim::SnapshotSchedule::every(plan.snapshot_dt, plan.horizon).times;
  const std::size_t nf = plan.observables.size();

  // deterministic limit on the grid
  const meanfield::Model model = meanfield::make_model(base, plan.grid_nodes);
  auto shape = [&](const Point& x) { return plan.initial_shape ? plan.initial_shape(x) : 1.0; };
  meanfield::DensityField xi0 = meanfield::DensityField::from_function(model.grid, shape);
  const double m = xi0.mass();
  for (double& v : xi0.values()) v *= plan.initial_mass / m;
  const auto sol = meanfield::integrate(model, xi0, plan.horizon, plan.solver_dt, rep.times);
  rep.limit.assign(nf, std::vector<double>(rep.times.size()));
  const double cell = model.grid.cell_volume();
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    for (std::size_t k = 0; k < nf; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < model.grid.size(); ++j) {
        s += sol.outputs[i][j] * plan.observables[k](model.grid.node(j));
      }
      rep.limit[k][i] = s * cell;
    }
  }

  const sim::SnapshotSchedule schedule = sim::SnapshotSchedule::at(rep.times);
  for (std::size_t n : plan.ladder) {
    ModelParams p = base;
    const double a = base.alpha.constant_value() / static_cast<double>(n);
    p.alpha = RateField::constant(a);
    p.alpha_bar = a;
    const auto count0 = static_cast<std::size_t>(std::llround(static_cast<double>(n) * plan.initial_mass));
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto devs = sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
      Rng rng = rung_stream(plan.seed, n, id);
      Population pop(p.dim());
      while (pop.size() < count0) {
        const Point x = p.domain.sample_uniform(rng);
        if (!plan.initial_shape || rng.uniform() * plan.initial_shape_bound < plan.initial_shape(x)) {
          pop.add(x);
        }
      }
      stats::FunctionalObserver obs(plan.observables);
      sim::Simulator s(p, std::move(pop), std::move(rng), plan.options);
      const sim::Trace tr = s.run(sim::Horizon::until_time(plan.horizon), schedule, &obs);
      std::vector<double> sup(nf, 0.0);
      for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        const auto& o = tr.snapshots[i].observables;
        for (std::size_t k = 0; k < nf; ++k) {
          const double v = o[k * stats::FunctionalObserver::kSlots] * inv_n;
          sup[k] = std::max(sup[k], std::abs(v - rep.limit[k][i]));
        }
      }
      return sup;
    });
    MeanFieldScalingRow row;
    row.n = n;
    row.replicates = plan.replicates;
    for (std::size_t k = 0; k < nf; ++k) {
      std::vector<double> sq;
      for (const auto& d : devs) sq.push_back(d[k] * d[k]);
      const stats::Summary s = stats::summarize(sq);
      const double rms = std::sqrt(s.mean);
      row.rms.push_back(rms);
      row.rms_stderr.push_back(rms > 0.0 ? s.stderr_ / (2.0 * rms) : 0.0);
    }
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < nf; ++k) {
    bool dec = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      dec = dec && rep.rows[i].rms[k] < rep.rows[i - 1].rms[k];
    }
    rep.strictly_decreasing.push_back(dec);
    rep.final_over_initial.push_back(rep.rows.back().rms[k] / rep.rows.front().rms[k]);
  }
  return rep;
}

ModelParams superprocess_params(const SuperprocessPlan& plan, std::size_t n) {
  const double nn = static_cast<double>(n);
  ParamSpec s;
  s.gamma = RateField::constant(nn * plan.gamma + plan.beta);
  s.mu = RateField::constant(nn * plan.gamma);
  s.alpha = RateField::constant(plan.alpha / nn);
  s.competition = Kernel::tophat_height(1, plan.u_radius, 1.0);
  s.dispersal = Kernel::gaussian(1, plan.sigma / nn);
  s.domain = SpatialDomain::unbounded(1);
  return make_params(s);
}

SuperprocessReport scaling_superprocess(const SuperprocessPlan& plan) {
  check_ladder(plan.ladder);
  if (plan.replicates < 2) throw BadConfig("superprocess scaling needs at least two replicates");
  const std::size_t nf = plan.observables.size();
  std::vector<TestFunction> squares;
  std::size_t unit = nf;  // index of the f = 1 observable, if any
  for (std::size_t k = 0; k < nf; ++k) {
    squares.push_back(squared(plan.observables[k]));
    const TestFunction& f = plan.observables[k];
    if (f.kind() == TestFunction::Kind::constant && f(Point{}) == 1.0) unit = k;
  }
  const auto times = sim::SnapshotSchedule::every(plan.horizon / 10.0, plan.horizon).times;
  const sim::SnapshotSchedule schedule = sim::SnapshotSchedule::at(times);
  const std::size_t mslots = stats::MartingaleObserver::kSlots * nf;

  SuperprocessReport rep;
  for (std::size_t n : plan.ladder) {
    const ModelParams p = superprocess_params(plan, n);
    const auto traces = sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
      Rng rng = rung_stream(plan.seed, n, id);
      Population pop(1);
      for (std::size_t i = 0; i < n; ++i) {
        Point x{};
        x[0] = rng.uniform(-plan.initial_half_width, plan.initial_half_width);
        pop.add(x);
      }
      stats::MartingaleObserver mart(p, plan.observables);
      stats::FunctionalObserver occ(squares);
      sim::ObserverList both({&mart, &occ});
      sim::Simulator s(p, std::move(pop), std::move(rng), plan.options);
      return s.run(sim::Horizon::until_time(plan.horizon), schedule, &both);
    });
    SuperprocessRow row;
    row.n = n;
    row.replicates = plan.replicates;
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < nf; ++k) {
      const stats::MartingaleSummary ms = stats::martingale_residual(traces, plan.horizon, k);
      std::vector<double> occ;
      for (const auto& tr : traces) {
        const auto& o = tr.at(plan.horizon).observables;
        occ.push_back(o[mslots + k * stats::FunctionalObserver::kSlots + 1]);
      }
      const double mean_occ = stats::summarize(occ).mean;
      // M^{n,f} = M^f / n, so Var(M^{n,f}) = Var(M^f) / n^2 while the limit
      // bracket is 2 gamma int <X^n, f^2> = 2 gamma int <nu, f^2> / n.
      row.finite_ratio.push_back(ms.ratio);
      row.limit_ratio.push_back(ms.variance / (nn * nn) / (2.0 * plan.gamma * mean_occ / nn));
      row.mean_martingale.push_back(ms.mean / nn);
      row.mean_martingale_stderr.push_back(ms.stderr_ / nn);
    }
    if (plan.beta == 0.0 && unit < nf) {
      for (const auto& tr : traces) {
        double prev = 0.0;
        const double v0 = tr.snapshots.front().observables[stats::MartingaleObserver::kSlots * unit];
        for (const auto& snap : tr.snapshots) {
          const auto& o = snap.observables;
          const std::size_t b = stats::MartingaleObserver::kSlots * unit;
          const double drift = o[b] - v0 - o[b + 1];
          if (drift > prev + 1e-9 * (1.0 + std::abs(prev))) row.drift_nonincreasing = false;
          prev = drift;
        }
      }
    }
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < nf; ++k) {
    const double first = std::abs(rep.rows.front().limit_ratio[k] - 1.0);
    const double last = std::abs(rep.rows.back().limit_ratio[k] - 1.0);
    rep.trend_toward_one.push_back(last <= first);
  }
  return rep;
}

}  // namespace bpdl::experiments
