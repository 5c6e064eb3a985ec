#include "bpdl/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "bpdl/errors.hpp"
#include "bpdl/experiments/meanfield_checks.hpp"
#include "bpdl/meanfield/solver.hpp"
#include "bpdl/sim/fleet.hpp"
#include "bpdl/sim/simulator.hpp"
#include "bpdl/sim/trace_io.hpp"
#include "bpdl/stats/estimators.hpp"
#include "bpdl/stats/hypothesis.hpp"

namespace bpdl::cli {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string emit_yaml(const YAML::Node& n) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << n;
  return std::string(e.c_str()) + "\n";
}

std::string tag(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

// Mean and standard error of each column over the selected rows.
struct SeriesStats {
  std::vector<double> mean, se;
};

SeriesStats series_stats(const std::vector<std::vector<double>>& rows, std::size_t columns) {
  SeriesStats s;
  s.mean.assign(columns, std::nan(""));
  s.se.assign(columns, std::nan(""));
  if (rows.empty()) return s;
  std::vector<double> col(rows.size());
  for (std::size_t k = 0; k < columns; ++k) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][k];
    if (rows.size() == 1) {
      s.mean[k] = col[0];
      continue;
    }
    const auto sum = stats::summarize(col);
    s.mean[k] = sum.mean;
    s.se[k] = sum.stderr_;
  }
  return s;
}

double window_count(const Population& pop, double w) {
  double n = 0.0;
  for (const Point& x : pop.positions()) n += std::abs(x[0]) <= w ? 1.0 : 0.0;
  return n;
}

Json summary_json(const stats::Summary& s) {
  return Json{{"mean", s.mean}, {"stderr", s.stderr_}, {"variance", s.variance}, {"n", s.n}};
}

}  // namespace

CommandResult simulate(const RunContext& ctx, OutputDir& out) {
  const Section root(ctx.config, "");
  const ModelParams params = parse_model(root.child("model"));
  const Population initial = parse_initial(root.child("initial"), params, ctx.seed);
  const Section run = root.child("run");
  const std::size_t replicates = run.count("replicates");
  if (replicates < 1) run.fail("need at least one replicate in", "replicates");
  const double horizon = run.number("horizon");
  if (!(horizon > 0.0)) run.fail("horizon must be positive in", "horizon");
  sim::SimOptions options;
  options.engine = parse_engine(run.text("engine", "indexed"));
  options.event_cap = run.count("event_cap", options.event_cap);

  const auto snaps = run.child("snapshots");
  sim::SnapshotSchedule schedule;
  const bool positions = snaps.flag("positions", false);
  if (snaps.has("every")) {
    schedule = sim::SnapshotSchedule::every(snaps.number("every"), horizon, positions);
  } else {
    auto times = snaps.numbers("at");
    std::sort(times.begin(), times.end());
    if (times.empty() || times.front() < 0.0 || times.back() > horizon) {
      snaps.fail("snapshot times must lie in [0, horizon] in", "at");
    }
    schedule = sim::SnapshotSchedule::at(times, positions);
  }

  const auto analysis = root.maybe_child("analysis");
  const bool condition = analysis && analysis->flag("condition_on_survival", false);
  const std::optional<double> count_w =
      analysis && analysis->has("count_window") ? std::optional(analysis->number("count_window"))
                                                : std::nullopt;
  const std::optional<double> load_r =
      analysis && analysis->has("load_radius") ? std::optional(analysis->number("load_radius"))
                                               : std::nullopt;
  const auto histogram = analysis ? analysis->maybe_child("histogram") : std::nullopt;
  if ((count_w || load_r || histogram) && !positions) {
    root.fail("window counts, loads and histograms need recorded positions:",
              "run.snapshots.positions");
  }
  if ((count_w || load_r || histogram) && params.dim() != 1) {
    root.fail("window counts, loads and histograms are available for d = 1 only:", "model.domain");
  }

  const auto traces = sim::run_fleet(replicates, ctx.threads, [&](std::size_t id) {
    sim::Simulator s(params, initial, Rng::stream(ctx.seed, id), options);
    auto tr = s.run(sim::Horizon::until_time(horizon), schedule);
    tr.replicate_id = id;
    tr.master_seed = ctx.seed;
    return tr;
  });

  std::vector<std::size_t> used;
  for (std::size_t r = 0; r < traces.size(); ++r) {
    if (!condition || !traces[r].extinct) used.push_back(r);
  }
  const std::vector<double>& times = schedule.times;
  const std::size_t nt = times.size();
  auto table_of = [&](const std::function<double(const sim::Snapshot&)>& fn) {
    std::vector<std::vector<double>> rows;
    for (std::size_t r : used) {
      std::vector<double> row(nt);
      for (std::size_t k = 0; k < nt; ++k) row[k] = fn(traces[r].snapshots[k]);
      rows.push_back(std::move(row));
    }
    return series_stats(rows, nt);
  };

  std::vector<PlotSpec> plots;
  Json summary;
  summary["command"] = "simulate";
  summary["replicates"] = replicates;
  std::size_t extinct = 0;
  for (const auto& t : traces) extinct += t.extinct ? 1 : 0;
  summary["extinct"] = extinct;
  summary["conditioned_on_survival"] = condition;
  summary["replicates_used"] = used.size();
  if (params.constant_rates() && params.alpha.constant_value() > 0.0) {
    summary["carrying_capacity"] = carrying_capacity(params);
  }

  const auto counts = table_of([](const sim::Snapshot& s) { return static_cast<double>(s.count); });
  out.write_table("counts.dat", {{"t", times}, {"mean_count", counts.mean}, {"stderr", counts.se}});
  plots.push_back({"population size", "counts.dat", "t", "count", {{"1:2:3", "mean"}}, std::nullopt,
                   true});
  summary["final_mean_count"] = counts.mean.empty() ? 0.0 : counts.mean.back();

  const auto averaging = analysis ? analysis->maybe_child("average") : std::nullopt;
  auto time_average = [&](const std::function<double(const sim::Snapshot&)>& fn) {
    const double from = averaging->number("from");
    const double to = averaging->number("to");
    std::vector<double> per;
    for (std::size_t r : used) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& s : traces[r].snapshots) {
        if (s.t >= from - 1e-9 && s.t <= to + 1e-9) {
          sum += fn(s);
          ++n;
        }
      }
      if (n == 0) averaging->fail("no snapshots inside the averaging window");
      per.push_back(sum / static_cast<double>(n));
    }
    return per.size() >= 2 ? summary_json(stats::summarize(per)) : Json(nullptr);
  };

  if (count_w) {
    const double w = *count_w;
    auto fn = [&](const sim::Snapshot& s) { return window_count(s.population(1), w); };
    const auto st = table_of(fn);
    out.write_table("window_count.dat", {{"t", times}, {"mean", st.mean}, {"stderr", st.se}});
    std::optional<double> ref;
    if (summary.contains("carrying_capacity")) ref = summary["carrying_capacity"].get<double>() * 2.0 * w;
    plots.push_back({"count in [-" + tag(w) + ", " + tag(w) + "]", "window_count.dat", "t", "count",
                     {{"1:2:3", "mean"}}, ref, true});
    summary["count_window"] = {{"half_width", w}};
    if (ref) summary["count_window"]["reference"] = *ref;
    if (averaging) summary["count_window"]["time_average"] = time_average(fn);
  }
  if (load_r) {
    const double r = *load_r;
    auto fn = [&](const sim::Snapshot& s) {
      return stats::interaction_load(s.population(1), params, r);
    };
    const auto st = table_of(fn);
    out.write_table("load.dat", {{"t", times}, {"mean", st.mean}, {"stderr", st.se}});
    std::optional<double> ref;
    if (summary.contains("carrying_capacity")) {
      const double c0 = summary["carrying_capacity"].get<double>();
      ref = 2.0 * r * c0 * c0 * params.competition.mass();
    }
    plots.push_back({"interaction load, r = " + tag(r), "load.dat", "t", "load", {{"1:2:3", "mean"}},
                     ref, true});
    summary["interaction_load"] = {{"radius", r}};
    if (ref) summary["interaction_load"]["reference"] = *ref;
    if (averaging) summary["interaction_load"]["time_average"] = time_average(fn);
  }
  if (histogram) {
    const double h = histogram->number("half_width");
    const double bin = histogram->number("bin");
    if (!(bin > 0.0) || !(h > 0.0)) histogram->fail("bins must be positive in");
    const auto nb = static_cast<std::size_t>(std::llround(2.0 * h / bin));
    std::vector<double> edges(nb + 1), centres(nb);
    for (std::size_t k = 0; k <= nb; ++k) edges[k] = -h + static_cast<double>(k) * bin;
    for (std::size_t k = 0; k < nb; ++k) centres[k] = 0.5 * (edges[k] + edges[k + 1]);
    std::vector<sim::Trace> sel;
    for (std::size_t r : used) sel.push_back(traces[r]);
    Json hist = Json::array();
    for (double t : histogram->numbers("times", times)) {
      const std::string file = "density_t" + tag(t) + ".dat";
      if (sel.size() < 2) break;
      const auto hg = stats::density_histogram(sel, t, edges);
      out.write_table(file, {{"x", centres}, {"intensity", hg.intensity}, {"stderr", hg.stderr_}});
      std::optional<double> ref;
      if (summary.contains("carrying_capacity")) ref = summary["carrying_capacity"].get<double>();
      plots.push_back({"density at t = " + tag(t), file, "x", "intensity", {{"1:2:3", "mean"}}, ref,
                       true});
      hist.push_back({{"t", t}, {"file", file}});
    }
    summary["histograms"] = hist;
  }

  if (!analysis || analysis->flag("write_traces", true)) {
    std::ostringstream os;
    sim::write_trace_csv(os, traces);
    out.write_text("traces.csv", os.str());
  }
  if (analysis && analysis->flag("write_positions", false)) {
    std::ostringstream os;
    sim::write_positions_csv(os, traces);
    out.write_text("positions.csv", os.str());
  }
  out.write_text("plot.gp", gnuplot_script("simulate.png", plots));
  return {summary, true};
}

CommandResult meanfield(const RunContext& ctx, OutputDir& out) {
  namespace ex = experiments;
  const Section root(ctx.config, "");
  const std::string check = root.text("check");
  const auto plan = root.maybe_child("plan");
  auto num = [&](const char* key, double fallback) { return plan ? plan->number(key, fallback) : fallback; };
  auto cnt = [&](const char* key, std::size_t fallback) {
    return plan ? static_cast<std::size_t>(plan->count(key, fallback)) : fallback;
  };
  Json s;
  s["command"] = "meanfield";
  s["check"] = check;

  if (check == "logistic-oracle") {
    ex::SolverCheckPlan p;
    p.side = num("side", p.side);
    p.nodes = cnt("nodes", p.nodes);
    p.initial = num("initial", p.initial);
    p.horizon = num("horizon", p.horizon);
    p.dt = num("dt", p.dt);
    const auto r = ex::solver_check(p);
    std::vector<double> err(r.times.size());
    for (std::size_t i = 0; i < err.size(); ++i) err[i] = r.intensity[i] - r.closed_form[i];
    out.write_table("logistic.dat", {{"t", r.times}, {"intensity", r.intensity},
                                     {"closed_form", r.closed_form}, {"error", err}});
    out.write_table("mass_decay.dat", {{"t", r.decay_times}, {"mass", r.decay_mass},
                                       {"bound", r.decay_bound}});
    out.write_text("plot.gp",
                   gnuplot_script("meanfield.png",
                                  {{"uniform start vs logistic", "logistic.dat", "t", "intensity",
                                    {{"1:2", "solver"}, {"1:3", "closed form"}}, std::nullopt, false},
                                   {"mass decay for gamma < mu", "mass_decay.dat", "t", "mass",
                                    {{"1:2", "mass"}, {"1:3", "bound"}}, std::nullopt, false}}));
    s["logistic"] = {{"max_error", r.logistic_max_error}, {"pass", r.logistic_ok}};
    s["rk4_order"] = {{"error_dt", r.order_error_coarse}, {"error_dt_half", r.order_error_fine},
                      {"ratio", r.order_ratio}, {"pass", r.order_ok}};
    s["mass_decay"] = {{"worst_ratio", r.decay_worst_ratio}, {"pass", r.decay_ok}};
    s["pass"] = r.pass;
    return {s, r.pass};
  }
  if (check == "fixed-point") {
    ex::FixedPointPlan p;
    p.side = num("side", p.side);
    p.nodes = cnt("nodes", p.nodes);
    p.amplitude = num("amplitude", p.amplitude);
    const auto r = ex::fixed_point_check(p);
    const std::size_t n = r.run.contraction.size();
    std::vector<double> it(n), dist(n), fac(n), bound(n), floor(n);
    for (std::size_t k = 0; k < n; ++k) {
      it[k] = static_cast<double>(k + 1);
      dist[k] = r.run.distance_to_c0[k + 1];
      fac[k] = r.run.contraction[k];
      bound[k] = r.run.contraction_bound[k];
      floor[k] = r.run.running_min[k];
    }
    out.write_table("contraction.dat", {{"iteration", it}, {"distance_to_c0", dist},
                                        {"factor", fac}, {"bound", bound}, {"running_min", floor}});
    out.write_text("plot.gp",
                   gnuplot_script("meanfield.png",
                                  {{"fixed-point contraction", "contraction.dat", "iteration", "factor",
                                    {{"1:3", "measured"}, {"1:4", "bound"}}, std::nullopt, false}}));
    s["c0"] = r.c0;
    s["F_residual"] = r.f_residual;
    s["F_fixes_c0"] = r.f_ok;
    s["hypotheses"] = {{"assumption_c", r.hypotheses.assumption_c.pass},
                       {"gamma_exceeds_2d_mu", r.hypotheses.gamma_exceeds_2d_mu},
                       {"alpha_positive", r.hypotheses.alpha_positive},
                       {"dispersal_nonincreasing", r.hypotheses.dispersal_nonincreasing},
                       {"pass", r.hypotheses.pass}};
    s["iterations"] = r.run.iterations;
    s["final_distance"] = r.final_distance;
    s["converged"] = r.converged;
    s["worst_contraction_margin"] = r.worst_contraction_margin;
    s["contraction_within_bound"] = r.contraction_ok;
    s["pass"] = r.pass;
    return {s, r.pass};
  }
  if (check == "dbc-decay") {
    ex::DecayPlan p;
    p.side = num("side", p.side);
    p.nodes = cnt("nodes", p.nodes);
    p.dt = num("dt", p.dt);
    p.dbc_horizon = num("dbc_horizon", p.dbc_horizon);
    p.l2_horizon = num("l2_horizon", p.l2_horizon);
    const auto r = ex::decay_check(p);
    out.write_table("l2_decay.dat", {{"t", r.l2.times}, {"E", r.l2.l2}});
    out.write_text("plot.gp",
                   gnuplot_script("meanfield.png",
                                  {{"squared distance to c0", "l2_decay.dat", "t", "E(t)",
                                    {{"1:2", "E"}}, std::nullopt, false}}));
    s["detailed_balance"] = {{"worst_ratio", r.dbc.worst_ratio}, {"bound_holds", r.dbc.bound_holds},
                             {"monotone", r.dbc.monotone}, {"checks", r.dbc.checks}};
    s["l2_decay"] = {{"nonincreasing", r.l2.nonincreasing}, {"rate", r.l2.rate},
                     {"r2", r.l2.r2}, {"pass", r.l2_ok}};
    s["pass"] = r.pass;
    return {s, r.pass};
  }
  if (check == "integrate") {
    const ModelParams params = parse_model(root.child("model"));
    const Section run = root.child("run");
    const auto model = meanfield::make_model(params, run.count("nodes", 256));
    const Section init = root.child("initial");
    const double base = init.number("constant");
    const double amp = init.number("bump_amplitude", 0.0);
    const double width = init.number("bump_width", 1.0);
    if (!(width > 0.0)) init.fail("bump width must be positive in", "bump_width");
    const auto f0 = meanfield::DensityField::from_function(model.grid, [&](const Point& x) {
      double r2 = 0.0;
      for (int a = 0; a < model.grid.dim; ++a) r2 += x[a] * x[a];
      return base + amp * std::exp(-r2 / (2.0 * width * width));
    });
    const double horizon = run.number("horizon");
    auto outputs = run.numbers("outputs", {horizon});
    std::sort(outputs.begin(), outputs.end());
    const auto res = meanfield::integrate(model, f0, horizon, run.number("dt"), outputs);
    std::vector<Column> cols;
    std::vector<double> xs(model.grid.size());
    for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = model.grid.node(k)[0];
    cols.push_back({"x", xs});
    cols.push_back({"t0", f0.values()});
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      cols.push_back({"t" + tag(outputs[i]), res.outputs[i].values()});
    }
    out.write_table("fields.dat", cols);
    std::vector<Column> tr{{"t", res.times}, {"mass", res.masses}};
    if (!res.l2_to_c0.empty()) tr.push_back({"l2_to_c0", res.l2_to_c0});
    out.write_table("mass.dat", tr);
    out.write_text("plot.gp",
                   gnuplot_script("meanfield.png",
                                  {{"mass", "mass.dat", "t", "mass", {{"1:2", "mass"}}, std::nullopt,
                                    false}}));
    s["final_mass"] = res.masses.back();
    s["max_clip_fraction"] = res.max_clip_fraction;
    s["steps"] = res.times.size() - 1;
    return {s, true};
  }
  root.fail("unknown meanfield check '" + check +
                "' (logistic-oracle, fixed-point, dbc-decay, integrate) in",
            "check");
}

int execute(const Invocation& inv) {
  static const std::vector<std::string> commands{"simulate", "meanfield", "experiment"};
  if (std::find(commands.begin(), commands.end(), inv.command) == commands.end()) {
    throw BadConfig("unknown command '" + inv.command + "'");
  }
  YAML::Node cfg = load_config(inv.preset, inv.config);
  if (cfg["command"] && cfg["command"].as<std::string>() != inv.command) {
    throw BadConfig("this config is for the '" + cfg["command"].as<std::string>() +
                    "' command, not '" + inv.command + "'");
  }
  std::string name;
  if (inv.command == "experiment") {
    if (inv.experiment) {
      name = *inv.experiment;
    } else if (cfg["experiment"]) {
      name = cfg["experiment"].as<std::string>();
    } else {
      throw BadConfig("experiment name missing (positional NAME or 'experiment' in the config)");
    }
    if (std::find(experiment_names().begin(), experiment_names().end(), name) ==
        experiment_names().end()) {
      std::string names;
      for (const auto& n : experiment_names()) names += (names.empty() ? "" : ", ") + n;
      throw UnknownExperiment("'" + name + "'; valid names: " + names);
    }
    cfg["experiment"] = name;
  }

  RunContext ctx;
  ctx.preset = inv.preset.value_or("");
  ctx.seed = inv.seed ? *inv.seed : Section(cfg, "").count("seed", 1);
  ctx.threads = inv.threads.value_or(0);
  ctx.expensive = inv.expensive;
  cfg["command"] = inv.command;
  cfg["seed"] = ctx.seed;
  ctx.config = cfg;

  OutputDir out(inv.out);
  const std::string config_text = emit_yaml(cfg);
  const std::string started = utc_now();
  CommandResult res;
  if (inv.command == "simulate") {
    res = simulate(ctx, out);
  } else if (inv.command == "meanfield") {
    res = meanfield(ctx, out);
  } else {
    res = experiment(name, ctx, out);
  }
  res.summary["seed"] = ctx.seed;
  res.summary["pass"] = res.pass;
  out.write_json("summary.json", res.summary);
  out.write_text("config.yaml", config_text);

  Json manifest;
  manifest["tool"] = "bpdl";
  manifest["version"] = kToolVersion;
  manifest["command"] = inv.command;
  if (!name.empty()) manifest["experiment"] = name;
  manifest["preset"] = ctx.preset;
  manifest["seed"] = ctx.seed;
  manifest["started"] = started;
  manifest["finished"] = utc_now();
  manifest["config"] = config_text;
  Json files = Json::array();
  for (const auto& f : out.files()) {
    std::ifstream in(out.root() / f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    files.push_back({{"file", f}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }
  manifest["outputs"] = files;
  out.write_json("manifest.json", manifest);
  return res.pass ? kExitOk : kExitFailed;
}

}  // namespace bpdl::cli
