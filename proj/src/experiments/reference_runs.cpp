#include "bpdl/experiments/reference_runs.hpp"

#include <algorithm>
#include <cmath>

#include "bpdl/errors.hpp"
#include "bpdl/sim/fleet.hpp"
#include "bpdl/stats/functionals.hpp"

namespace bpdl::experiments {

namespace {

std::vector<double> grid(double t0, double t1, double dt) {
  std::vector<double> out;
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  for (std::size_t k = 0; k <= steps; ++k) out.push_back(t0 + static_cast<double>(k) * dt);
  return out;
}

void check_setup(const ReferenceSetup& s) {
  if (s.replicates < 2) throw BadConfig("reference runs need at least two replicates");
  if (!(s.torus_side > 0.0)) throw BadConfig("torus side must be positive");
}

std::vector<sim::Trace> survivors_of(std::vector<sim::Trace> traces) {
  std::erase_if(traces, [](const sim::Trace& t) { return t.extinct; });
  return traces;
}

// Mean and standard error per column of a replicate-by-time table.
void column_stats(const std::vector<std::vector<double>>& rows, std::size_t columns,
                  std::vector<double>& mean, std::vector<double>& se) {
  mean.assign(columns, 0.0);
  se.assign(columns, 0.0);
  if (rows.size() < 2) return;
  std::vector<double> col(rows.size());
  for (std::size_t k = 0; k < columns; ++k) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][k];
    const auto s = stats::summarize(col);
    mean[k] = s.mean;
    se[k] = s.stderr_;
  }
}

}  // namespace

ModelParams reference_params(double torus_side) {
  return make_params(reference_spec(SpatialDomain::torus(1, torus_side)));
}

DensityReport density_run(const DensityPlan& plan) {
  check_setup(plan.setup);
  if (!(plan.bin_width > 0.0) || plan.judge_half_width > plan.plot_half_width) {
    throw BadConfig("density bins must be positive and cover the judged window");
  }
  if (std::find(plan.times.begin(), plan.times.end(), plan.judge_time) == plan.times.end()) {
    throw BadConfig("judge time must be one of the snapshot times");
  }
  const ModelParams p = reference_params(plan.setup.torus_side);
  const double horizon = *std::max_element(plan.times.begin(), plan.times.end());
  const auto schedule = sim::SnapshotSchedule::at(plan.times, true);
  const auto traces = sim::run_fleet(plan.setup.replicates, plan.setup.threads, [&](std::size_t id) {
    sim::Simulator s(p, Population::repeated(1, Point{}, plan.initial_count),
                     Rng::stream(plan.setup.seed, id), plan.setup.options);
    return s.run(sim::Horizon::until_time(horizon), schedule);
  });

  DensityReport rep;
  rep.c0 = carrying_capacity(p);
  rep.replicates = traces.size();
  const auto alive = survivors_of(traces);
  rep.survivors = alive.size();
  rep.times = plan.times;
  if (alive.size() < 2) return rep;

  const double h = plan.plot_half_width;
  const auto nb = static_cast<std::size_t>(std::llround(2.0 * h / plan.bin_width));
  std::vector<double> edges(nb + 1);
  for (std::size_t k = 0; k <= nb; ++k) edges[k] = -h + static_cast<double>(k) * plan.bin_width;
  for (double t : plan.times) rep.histograms.push_back(stats::density_histogram(alive, t, edges));

  const auto& judged =
      rep.histograms[std::find(plan.times.begin(), plan.times.end(), plan.judge_time) -
                     plan.times.begin()];
  const double w = plan.judge_half_width;
  std::vector<double> pooled(alive.size(), 0.0);
  for (std::size_t r = 0; r < alive.size(); ++r) {
    const auto pop = alive[r].at(plan.judge_time).population(1);
    for (const Point& x : pop.positions()) pooled[r] += std::abs(x[0]) <= w ? 1.0 : 0.0;
    pooled[r] /= 2.0 * w;
  }
  const auto ps = stats::summarize(pooled);
  rep.pooled_intensity = ps.mean;
  rep.pooled_stderr = ps.stderr_;
  bool ok = true;
  for (std::size_t k = 0; k < nb; ++k) {
    if (edges[k] < -w - 1e-12 || edges[k + 1] > w + 1e-12) continue;
    const double dev = std::abs(judged.intensity[k] - rep.c0) / rep.c0;
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, dev);
    ok = ok && dev <= plan.tolerance;
  }
  rep.pass = ok;
  return rep;
}

CountReport count_run(const CountPlan& plan) {
  check_setup(plan.setup);
  if (!(plan.t_from < plan.t_to) || plan.t_to > plan.horizon) {
    throw BadConfig("averaging window must lie inside the horizon");
  }
  const ModelParams p = reference_params(plan.setup.torus_side);
  const double w = plan.window_half_width;
  CountReport rep;
  rep.target = carrying_capacity(p) * 2.0 * w;

  auto times = grid(0.0, plan.horizon, plan.series_dt);
  for (double t : {plan.t_from, plan.t_to}) {
    if (std::none_of(times.begin(), times.end(), [&](double s) { return std::abs(s - t) < 1e-9; })) {
      times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());
  const auto schedule = sim::SnapshotSchedule::at(times);
  const auto find_time = [&](double t) {
    return static_cast<std::size_t>(
        std::find_if(times.begin(), times.end(), [&](double s) { return std::abs(s - t) < 1e-9; }) -
        times.begin());
  };
  const std::size_t k_from = find_time(plan.t_from);
  const std::size_t k_to = find_time(plan.t_to);

  rep.pass = true;
  for (std::size_t c = 0; c < plan.initial_counts.size(); ++c) {
    const std::size_t n0 = plan.initial_counts[c];
    const auto traces =
        sim::run_fleet(plan.setup.replicates, plan.setup.threads, [&](std::size_t id) {
          stats::FunctionalObserver obs({TestFunction::indicator(-w, w)});
          sim::Simulator s(p, Population::repeated(1, Point{}, n0),
                           Rng::stream(plan.setup.seed, (c << 32) | id), plan.setup.options);
          return s.run(sim::Horizon::until_time(plan.horizon), schedule, &obs);
        });
    const auto alive = survivors_of(traces);
    CountSeries cs;
    cs.initial_count = n0;
    cs.survivors = alive.size();
    cs.times = times;
    std::vector<std::vector<double>> rows;
    std::vector<double> avg;
    for (const auto& tr : alive) {
      std::vector<double> row;
      for (const auto& snap : tr.snapshots) row.push_back(snap.observables[0]);
      rows.push_back(std::move(row));
      const double occ = tr.snapshots[k_to].observables[1] - tr.snapshots[k_from].observables[1];
      avg.push_back(occ / (plan.t_to - plan.t_from));
    }
    column_stats(rows, times.size(), cs.mean, cs.stderr_);
    if (avg.size() >= 2) {
      cs.time_average = stats::summarize(avg);
      cs.relative_deviation = (cs.time_average.mean - rep.target) / rep.target;
      cs.pass = std::abs(cs.relative_deviation) <= plan.tolerance;
    }
    rep.pass = rep.pass && cs.pass;
    rep.series.push_back(std::move(cs));
  }
  return rep;
}

LoadReport load_run(const LoadPlan& plan) {
  check_setup(plan.setup);
  if (!(plan.t_from < plan.t_to) || plan.t_to > plan.horizon) {
    throw BadConfig("averaging window must lie inside the horizon");
  }
  const ModelParams p = reference_params(plan.setup.torus_side);
  const double c0 = carrying_capacity(p);
  LoadReport rep;
  // int c0 dx int c0 dy 1{|x| <= r} U(x, y) with int U = 1
  rep.target = 2.0 * plan.radius * c0 * c0 * p.competition.mass();
  rep.times = grid(0.0, plan.horizon, plan.series_dt);
  const auto schedule = sim::SnapshotSchedule::at(rep.times, true);

  const auto traces = sim::run_fleet(plan.setup.replicates, plan.setup.threads, [&](std::size_t id) {
    sim::Simulator s(p, Population::repeated(1, Point{}, 1), Rng::stream(plan.setup.seed, id),
                     plan.setup.options);
    auto tr = s.run(sim::Horizon::until_time(plan.horizon), schedule);
    // keep only the load, not the positions
    for (auto& snap : tr.snapshots) {
      snap.observables = {stats::interaction_load(snap.population(1), p, plan.radius)};
      snap.coords.clear();
      snap.coords.shrink_to_fit();
    }
    return tr;
  });
  const auto alive = survivors_of(traces);
  rep.survivors = alive.size();
  std::vector<std::vector<double>> rows;
  std::vector<double> avg;
  for (const auto& tr : alive) {
    std::vector<double> row;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& snap : tr.snapshots) {
      row.push_back(snap.observables[0]);
      if (snap.t >= plan.t_from - 1e-9 && snap.t <= plan.t_to + 1e-9) {
        sum += snap.observables[0];
        ++n;
      }
    }
    rows.push_back(std::move(row));
    avg.push_back(sum / static_cast<double>(n));
  }
  column_stats(rows, rep.times.size(), rep.mean, rep.stderr_);
  if (avg.size() >= 2) {
    rep.time_average = stats::summarize(avg);
    rep.relative_deviation = (rep.time_average.mean - rep.target) / rep.target;
    rep.pass = std::abs(rep.relative_deviation) <= plan.tolerance;
  }
  return rep;
}

std::vector<EnginePreset> engine_presets() {
  std::vector<EnginePreset> out;
  out.push_back({"reference", reference_params(40.0), Population::repeated(1, Point{}, 1)});

  ParamSpec g;
  g.domain = SpatialDomain::torus(1, 20.0);
  g.gamma = RateField::constant(3.0);
  g.mu = RateField::constant(0.5);
  g.alpha = RateField::constant(0.5);
  g.competition = Kernel::gaussian(1, 0.25);
  g.dispersal = Kernel::gaussian(1, 1.0);
  out.push_back({"gaussian", make_params(g), Population::repeated(1, Point{}, 10)});

  ParamSpec b;
  b.domain = SpatialDomain::box(1, -5.0, 5.0);
  b.gamma = RateField::function([](const Point& x) { return x[0] > 0.0 ? 6.0 : 4.0; }, 6.0);
  b.mu = RateField::constant(1.0);
  b.alpha = RateField::constant(1.0);
  b.competition = Kernel::tophat_height(1, 0.5, 1.0);
  b.dispersal = Kernel::tophat(1, 1.0);
  Population init(1);
  for (int k = -2; k <= 2; ++k) init.add(Point{static_cast<double>(k)});
  out.push_back({"box", make_params(b), init});
  return out;
}

EngineReport engine_equivalence(const EnginePlan& plan) {
  if (plan.replicates < 2) throw BadConfig("engine comparison needs at least two replicates");
  EngineReport rep;
  rep.pass = !plan.presets.empty();
  for (std::size_t k = 0; k < plan.presets.size(); ++k) {
    const auto& preset = plan.presets[k];
    auto finals = [&](sim::EngineKind engine, std::uint64_t lane) {
      sim::SimOptions opt;
      opt.engine = engine;
      return sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
        sim::Simulator s(preset.params, preset.initial,
                         Rng::stream(plan.seed, (k << 40) | (lane << 32) | id), opt);
        s.run(sim::Horizon::until_time(plan.horizon));
        return static_cast<double>(s.population().size());
      });
    };
    const auto a = finals(sim::EngineKind::faithful, 0);
    const auto b = finals(sim::EngineKind::indexed, 1);
    EngineRow row;
    row.name = preset.name;
    row.faithful_mean = stats::summarize(a).mean;
    row.indexed_mean = stats::summarize(b).mean;
    row.ks = stats::ks_two_sample(a, b);
    row.pass = row.ks.p_value > plan.p_min;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

MartingaleReport martingale_suite(const MartingalePlan& plan) {
  check_setup(plan.setup);
  const ModelParams p = reference_params(plan.setup.torus_side);
  const auto schedule = sim::SnapshotSchedule::at({plan.horizon});
  const auto traces = sim::run_fleet(plan.setup.replicates, plan.setup.threads, [&](std::size_t id) {
    stats::MartingaleObserver obs(p, plan.functions);
    sim::Simulator s(p, Population::repeated(1, Point{}, 1), Rng::stream(plan.setup.seed, id),
                     plan.setup.options);
    return s.run(sim::Horizon::until_time(plan.horizon), schedule, &obs);
  });
  MartingaleReport rep;
  rep.pass = !plan.functions.empty();
  for (std::size_t k = 0; k < plan.functions.size(); ++k) {
    MartingaleRow row;
    row.name = plan.functions[k].name();
    row.summary = stats::martingale_residual(traces, plan.horizon, k);
    row.mean_ok = std::abs(row.summary.mean) <= 3.0 * row.summary.stderr_;
    row.ratio_ok = row.summary.ratio >= plan.ratio_lo && row.summary.ratio <= plan.ratio_hi;
    rep.pass = rep.pass && row.mean_ok && row.ratio_ok;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

MomentReport moment_suite(const MomentPlan& plan) {
  check_setup(plan.setup);
  if (!(plan.dt > 0.0)) throw BadConfig("difference step must be positive");
  const ModelParams p = reference_params(plan.setup.torus_side);
  std::vector<double> times;
  for (double t : plan.times) {
    if (t - plan.dt <= 0.0) throw BadConfig("moment times must exceed the difference step");
    times.insert(times.end(), {t - plan.dt, t, t + plan.dt});
  }
  std::sort(times.begin(), times.end());
  const double horizon = times.back();
  const auto schedule = sim::SnapshotSchedule::at(times, true);
  const auto traces = sim::run_fleet(plan.setup.replicates, plan.setup.threads, [&](std::size_t id) {
    sim::Simulator s(p, Population::repeated(1, Point{}, 1), Rng::stream(plan.setup.seed, id),
                     plan.setup.options);
    auto tr = s.run(sim::Horizon::until_time(horizon), schedule);
    // positions are only needed at the centre times
    for (auto& snap : tr.snapshots) {
      const bool centre = std::any_of(plan.times.begin(), plan.times.end(),
                                      [&](double t) { return std::abs(snap.t - t) < 1e-9; });
      if (!centre) {
        snap.coords.clear();
        snap.coords.shrink_to_fit();
      }
    }
    return tr;
  });
  MomentReport rep;
  rep.pass = true;
  for (double t : plan.times) {
    auto r = stats::moment_residual(traces, t, plan.dt, p, plan.resamples, plan.level,
                                    plan.setup.seed);
    rep.pass = rep.pass && r.ci.contains(0.0);
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace bpdl::experiments
