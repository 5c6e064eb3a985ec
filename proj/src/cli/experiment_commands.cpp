#include <algorithm>
#include <cmath>
#include <sstream>

#include "bpdl/cli/commands.hpp"
#include "bpdl/errors.hpp"
#include "bpdl/experiments/extinction.hpp"
#include "bpdl/experiments/reference_runs.hpp"
#include "bpdl/experiments/scaling.hpp"
#include "bpdl/experiments/stationarity.hpp"

namespace bpdl::cli {

namespace ex = experiments;

namespace {

std::vector<std::size_t> ladder_of(const Section& s, const std::vector<std::size_t>& fallback) {
  if (!s.has("ladder")) return fallback;
  std::vector<std::size_t> out;
  for (double v : s.numbers("ladder")) {
    if (!(v >= 1.0) || v != std::floor(v)) s.fail("ladder entries must be positive integers in", "ladder");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// {constant: c} | {indicator: [lo, hi]} | {triangle: [center, half_width]}.
TestFunction parse_test_function(const Section& s) {
  if (s.has("constant")) return TestFunction::constant(s.number("constant"));
  if (s.has("indicator")) {
    const auto v = s.numbers("indicator");
    if (v.size() != 2 || !(v[0] < v[1])) s.fail("expected [lo, hi] for", "indicator");
    return TestFunction::indicator(v[0], v[1]);
  }
  if (s.has("triangle")) {
    const auto v = s.numbers("triangle");
    if (v.size() != 2 || !(v[1] > 0.0)) s.fail("expected [center, half_width] for", "triangle");
    return TestFunction::triangle(v[0], v[1]);
  }
  s.fail("expected constant, indicator or triangle in");
}

std::vector<TestFunction> parse_test_functions(const Section& plan, const std::string& key,
                                               std::vector<TestFunction> fallback) {
  if (!plan.has(key)) return fallback;
  const YAML::Node list = plan.node()[key];
  if (!list.IsSequence() || list.size() == 0) plan.fail("expected a nonempty list in", key);
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(parse_test_function(Section(list[i], plan.path() + "." + key + "[" +
                                                           std::to_string(i) + "]")));
  }
  return out;
}

Json summary_json(const stats::Summary& s) {
  return Json{{"mean", s.mean}, {"stderr", s.stderr_}, {"n", s.n}};
}

Section plan_section(const RunContext& ctx) {
  const Section root(ctx.config, "");
  if (root.has("plan")) return root.child("plan");
  return Section(YAML::Node(YAML::NodeType::Map), "plan");
}

ex::ReferenceSetup setup_of(const Section& p, const RunContext& ctx, std::size_t replicates) {
  ex::ReferenceSetup s;
  s.torus_side = p.number("torus_side", s.torus_side);
  s.replicates = p.count("replicates", replicates);
  s.options.engine = parse_engine(p.text("engine", "indexed"));
  s.seed = ctx.seed;
  s.threads = ctx.threads;
  return s;
}

std::vector<double> as_double(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

// -- criteria on the reference model --------------------------------------

CommandResult run_density(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::DensityPlan plan;
  plan.setup = setup_of(p, ctx, plan.setup.replicates);
  plan.times = p.numbers("times", plan.times);
  plan.judge_time = p.number("judge_time", plan.judge_time);
  plan.bin_width = p.number("bin_width", plan.bin_width);
  plan.plot_half_width = p.number("plot_half_width", plan.plot_half_width);
  plan.judge_half_width = p.number("judge_half_width", plan.judge_half_width);
  plan.tolerance = p.number("tolerance", plan.tolerance);
  const auto r = ex::density_run(plan);

  std::vector<PlotSpec> plots;
  Json hist = Json::array();
  for (std::size_t k = 0; k < r.histograms.size(); ++k) {
    const auto& h = r.histograms[k];
    std::vector<double> centres;
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) centres.push_back(0.5 * (h.edges[b] + h.edges[b + 1]));
    std::ostringstream name;
    name << "density_t" << r.times[k] << ".dat";
    out.write_table(name.str(), {{"x", centres}, {"intensity", h.intensity}, {"stderr", h.stderr_}});
    plots.push_back({"density at t = " + std::to_string(r.times[k]), name.str(), "x", "intensity",
                     {{"1:2:3", "survivors"}}, r.c0, true});
    hist.push_back({{"t", r.times[k]}, {"file", name.str()}});
  }
  out.write_text("plot.gp", gnuplot_script("density.png", plots));
  Json s{{"experiment", "density"},
         {"c0", r.c0},
         {"replicates", r.replicates},
         {"survivors", r.survivors},
         {"judge_time", plan.judge_time},
         {"judge_half_width", plan.judge_half_width},
         {"pooled_intensity", r.pooled_intensity},
         {"pooled_stderr", r.pooled_stderr},
         {"pooled_relative_deviation", (r.pooled_intensity - r.c0) / r.c0},
         {"max_bin_relative_deviation", r.max_relative_deviation},
         {"tolerance", plan.tolerance},
         {"histograms", hist}};
  return {s, r.pass};
}

CommandResult run_window_count(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::CountPlan plan;
  plan.setup = setup_of(p, ctx, plan.setup.replicates);
  if (p.has("initial_counts")) {
    plan.initial_counts.clear();
    for (double v : p.numbers("initial_counts")) plan.initial_counts.push_back(static_cast<std::size_t>(v));
  }
  plan.window_half_width = p.number("window_half_width", plan.window_half_width);
  plan.horizon = p.number("horizon", plan.horizon);
  plan.t_from = p.number("t_from", plan.t_from);
  plan.t_to = p.number("t_to", plan.t_to);
  plan.series_dt = p.number("series_dt", plan.series_dt);
  plan.tolerance = p.number("tolerance", plan.tolerance);
  const auto r = ex::count_run(plan);
  std::vector<PlotSpec> plots;
  Json rows = Json::array();
  for (const auto& cs : r.series) {
    const std::string file = "window_count_n0_" + std::to_string(cs.initial_count) + ".dat";
    out.write_table(file, {{"t", cs.times}, {"mean", cs.mean}, {"stderr", cs.stderr_}});
    plots.push_back({"count in window from " + std::to_string(cs.initial_count) + " at 0", file, "t",
                     "count", {{"1:2:3", "survivors"}}, r.target, true});
    rows.push_back({{"initial_count", cs.initial_count},
                    {"survivors", cs.survivors},
                    {"time_average", summary_json(cs.time_average)},
                    {"relative_deviation", cs.relative_deviation},
                    {"pass", cs.pass},
                    {"file", file}});
  }
  out.write_text("plot.gp", gnuplot_script("window_count.png", plots));
  Json s{{"experiment", "window-count"}, {"target", r.target}, {"t_from", plan.t_from},
         {"t_to", plan.t_to}, {"tolerance", plan.tolerance}, {"series", rows}};
  return {s, r.pass};
}

CommandResult run_load(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::LoadPlan plan;
  plan.setup = setup_of(p, ctx, plan.setup.replicates);
  plan.radius = p.number("radius", plan.radius);
  plan.horizon = p.number("horizon", plan.horizon);
  plan.t_from = p.number("t_from", plan.t_from);
  plan.t_to = p.number("t_to", plan.t_to);
  plan.series_dt = p.number("series_dt", plan.series_dt);
  plan.tolerance = p.number("tolerance", plan.tolerance);
  const auto r = ex::load_run(plan);
  out.write_table("load.dat", {{"t", r.times}, {"mean", r.mean}, {"stderr", r.stderr_}});
  out.write_text("plot.gp", gnuplot_script("load.png", {{"interaction load", "load.dat", "t", "load",
                                                          {{"1:2:3", "survivors"}}, r.target, true}}));
  Json s{{"experiment", "interaction-load"}, {"radius", plan.radius},
         {"target", r.target},              {"survivors", r.survivors},
         {"time_average", summary_json(r.time_average)},
         {"relative_deviation", r.relative_deviation},
         {"tolerance", plan.tolerance}};
  return {s, r.pass};
}

CommandResult run_engines(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::EnginePlan plan;
  plan.horizon = p.number("horizon", plan.horizon);
  plan.replicates = p.count("replicates", plan.replicates);
  plan.p_min = p.number("p_min", plan.p_min);
  plan.seed = ctx.seed;
  plan.threads = ctx.threads;
  const auto r = ex::engine_equivalence(plan);
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"preset", row.name},
                    {"faithful_mean", row.faithful_mean},
                    {"indexed_mean", row.indexed_mean},
                    {"ks_statistic", row.ks.statistic},
                    {"p_value", row.ks.p_value},
                    {"pass", row.pass}});
  }
  Json s{{"experiment", "engine-equivalence"}, {"horizon", plan.horizon},
         {"replicates", plan.replicates},     {"p_min", plan.p_min}, {"rows", rows}};
  (void)out;
  return {s, r.pass};
}

CommandResult run_martingale(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::MartingalePlan plan;
  plan.setup = setup_of(p, ctx, plan.setup.replicates);
  plan.horizon = p.number("horizon", plan.horizon);
  plan.functions = parse_test_functions(p, "functions", plan.functions);
  const auto r = ex::martingale_suite(plan);
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"f", row.name},
                    {"mean", row.summary.mean},
                    {"stderr", row.summary.stderr_},
                    {"variance", row.summary.variance},
                    {"mean_bracket", row.summary.mean_bracket},
                    {"ratio", row.summary.ratio},
                    {"mean_ok", row.mean_ok},
                    {"ratio_ok", row.ratio_ok}});
  }
  Json s{{"experiment", "martingale"}, {"t", plan.horizon}, {"replicates", plan.setup.replicates},
         {"rows", rows}};
  (void)out;
  return {s, r.pass};
}

CommandResult run_moment(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::MomentPlan plan;
  plan.setup = setup_of(p, ctx, plan.setup.replicates);
  plan.times = p.numbers("times", plan.times);
  plan.dt = p.number("dt", plan.dt);
  plan.resamples = p.count("resamples", plan.resamples);
  plan.level = p.number("level", plan.level);
  const auto r = ex::moment_suite(plan);
  Json rows = Json::array();
  std::vector<double> t, res, lo, hi;
  for (const auto& m : r.rows) {
    rows.push_back({{"t", m.t},
                    {"intensity", m.intensity},
                    {"derivative", m.derivative},
                    {"covariance_u", m.covariance_u},
                    {"rhs", m.rhs},
                    {"residual", m.residual},
                    {"ci", {m.ci.lo, m.ci.hi}},
                    {"contains_zero", m.ci.contains(0.0)}});
    t.push_back(m.t);
    res.push_back(m.residual);
    lo.push_back(m.ci.lo);
    hi.push_back(m.ci.hi);
  }
  out.write_table("moment_residual.dat", {{"t", t}, {"residual", res}, {"ci_lo", lo}, {"ci_hi", hi}});
  Json s{{"experiment", "moment"}, {"replicates", plan.setup.replicates}, {"level", plan.level},
         {"resamples", plan.resamples}, {"rows", rows}};
  return {s, r.pass};
}

// -- the named studies -----------------------------------------------------

CommandResult run_scaling_c1(const RunContext& ctx, OutputDir& out) {
  const Section root(ctx.config, "");
  const Section p = plan_section(ctx);
  ex::MeanFieldScalingPlan plan;
  plan.base = parse_model(root.child("model"));
  plan.ladder = ladder_of(p, plan.ladder);
  plan.horizon = p.number("horizon", plan.horizon);
  plan.snapshot_dt = p.number("snapshot_dt", plan.snapshot_dt);
  plan.replicates = p.count("replicates", plan.replicates);
  plan.initial_mass = p.number("initial_mass", plan.initial_mass);
  plan.grid_nodes = p.count("grid_nodes", plan.grid_nodes);
  plan.solver_dt = p.number("solver_dt", plan.solver_dt);
  plan.observables = parse_test_functions(p, "observables", plan.observables);
  plan.options.engine = parse_engine(p.text("engine", "indexed"));
  plan.seed = ctx.seed;
  plan.threads = ctx.threads;
  const double max_ratio = p.number("max_final_ratio", 0.45);
  const auto r = ex::scaling_meanfield(plan);

  std::vector<Column> cols{{"n", as_double(plan.ladder)}};
  Json obs = Json::array();
  bool pass = true;
  for (std::size_t k = 0; k < plan.observables.size(); ++k) {
    std::vector<double> rms, se;
    for (const auto& row : r.rows) {
      rms.push_back(row.rms[k]);
      se.push_back(row.rms_stderr[k]);
    }
    cols.push_back({"rms_" + std::to_string(k), rms});
    cols.push_back({"stderr_" + std::to_string(k), se});
    const bool ok = r.strictly_decreasing[k] && r.final_over_initial[k] <= max_ratio;
    pass = pass && ok;
    obs.push_back({{"f", plan.observables[k].name()},
                   {"rms", rms},
                   {"rms_stderr", se},
                   {"strictly_decreasing", static_cast<bool>(r.strictly_decreasing[k])},
                   {"final_over_initial", r.final_over_initial[k]},
                   {"pass", ok}});
  }
  out.write_table("scaling.dat", cols);
  out.write_text("plot.gp", gnuplot_script("scaling.png", {{"RMS sup deviation", "scaling.dat", "n",
                                                            "RMS", {{"1:2:3", "f_0"}}, std::nullopt,
                                                            true}}));
  Json s{{"experiment", "scaling-c1"},    {"ladder", plan.ladder},
         {"replicates", plan.replicates}, {"horizon", plan.horizon},
         {"max_final_ratio", max_ratio},  {"observables", obs}};
  return {s, pass};
}

CommandResult run_scaling_c2(const RunContext& ctx, OutputDir& out) {
  if (!ctx.expensive) {
    throw BadConfig("scaling-c2 runs for minutes to hours; pass --expensive to run it");
  }
  const Section p = plan_section(ctx);
  ex::SuperprocessPlan plan;
  plan.gamma = p.number("gamma", plan.gamma);
  plan.beta = p.number("beta", plan.beta);
  plan.alpha = p.number("alpha", plan.alpha);
  plan.sigma = p.number("sigma", plan.sigma);
  plan.u_radius = p.number("u_radius", plan.u_radius);
  plan.initial_half_width = p.number("initial_half_width", plan.initial_half_width);
  plan.ladder = ladder_of(p, plan.ladder);
  plan.horizon = p.number("horizon", plan.horizon);
  plan.replicates = p.count("replicates", plan.replicates);
  plan.observables = parse_test_functions(p, "observables", plan.observables);
  plan.seed = ctx.seed;
  plan.threads = ctx.threads;
  const auto finite_n = static_cast<std::size_t>(p.count("finite_check_n", 50));
  const double flo = p.number("finite_lo", 0.8), fhi = p.number("finite_hi", 1.2);
  const double llo = p.number("limit_lo", 0.7), lhi = p.number("limit_hi", 1.3);
  if (std::find(plan.ladder.begin(), plan.ladder.end(), finite_n) == plan.ladder.end()) {
    p.fail("the ladder must contain finite_check_n in", "ladder");
  }
  const auto r = ex::scaling_superprocess(plan);

  bool pass = true;
  Json rows = Json::array();
  std::vector<Column> cols{{"n", as_double(plan.ladder)}};
  std::vector<std::vector<double>> fin(plan.observables.size()), lim(plan.observables.size());
  for (const auto& row : r.rows) {
    const bool check_finite = row.n == finite_n;
    bool finite_ok = true;
    for (std::size_t k = 0; k < plan.observables.size(); ++k) {
      fin[k].push_back(row.finite_ratio[k]);
      lim[k].push_back(row.limit_ratio[k]);
      if (check_finite) finite_ok = finite_ok && row.finite_ratio[k] >= flo && row.finite_ratio[k] <= fhi;
    }
    pass = pass && finite_ok && row.drift_nonincreasing;
    // finite-n bracket over limit bracket: both come from the same runs, so
    // the sampling noise of the variance cancels (diagnostic only)
    std::vector<double> bracket_quotient;
    for (std::size_t k = 0; k < plan.observables.size(); ++k) {
      bracket_quotient.push_back(row.limit_ratio[k] / row.finite_ratio[k]);
    }
    rows.push_back({{"n", row.n},
                    {"finite_over_limit_bracket", bracket_quotient},
                    {"finite_ratio", row.finite_ratio},
                    {"limit_ratio", row.limit_ratio},
                    {"mean_martingale", row.mean_martingale},
                    {"mean_martingale_stderr", row.mean_martingale_stderr},
                    {"drift_nonincreasing", row.drift_nonincreasing}});
  }
  Json trend = Json::array();
  for (std::size_t k = 0; k < plan.observables.size(); ++k) {
    const double last = lim[k].back();
    const bool ok = r.trend_toward_one[k] && last >= llo && last <= lhi;
    pass = pass && ok;
    trend.push_back({{"f", plan.observables[k].name()},
                     {"trend_toward_one", static_cast<bool>(r.trend_toward_one[k])},
                     {"final_limit_ratio", last},
                     {"pass", ok}});
    cols.push_back({"finite_" + std::to_string(k), fin[k]});
    cols.push_back({"limit_" + std::to_string(k), lim[k]});
  }
  out.write_table("brackets.dat", cols);
  out.write_text("plot.gp", gnuplot_script("brackets.png", {{"bracket ratios", "brackets.dat", "n",
                                                             "ratio", {{"1:2", "finite n"}, {"1:3", "limit"}},
                                                             1.0, false}}));
  Json s{{"experiment", "scaling-c2"}, {"ladder", plan.ladder}, {"replicates", plan.replicates},
         {"finite_check_n", finite_n}, {"rows", rows},          {"observables", trend}};
  return {s, pass};
}

Json stationarity_json(const ex::StationarityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"phi", row.name},
                    {"mean", row.mean},
                    {"stderr", row.stderr_},
                    {"ci", {row.ci.lo, row.ci.hi}},
                    {"contains_zero", row.contains_zero}});
  }
  return Json{{"intensity", r.intensity}, {"dbc_holds", r.dbc_holds}, {"rows", rows},
              {"all_contain_zero", r.all_contain_zero},
              {"none_contain_zero", r.none_contain_zero}};
}

CommandResult run_stationarity(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::StationarityPlan plan;
  plan.gamma = p.number("gamma", plan.gamma);
  plan.mu = p.number("mu", plan.mu);
  plan.alpha = p.number("alpha", plan.alpha);
  if (p.has("kernel")) plan.kernel = parse_kernel(p.child("kernel"), 1);
  plan.intensity = p.number("intensity", plan.intensity);
  plan.inner_half_width = p.number("inner_half_width", plan.inner_half_width);
  plan.replicates = p.count("replicates", plan.replicates);
  plan.seed = ctx.seed;
  plan.threads = ctx.threads;
  const auto r = ex::stationarity_test(plan);
  Json s{{"experiment", "stationarity"}, {"replicates", plan.replicates},
         {"detailed_balance", stationarity_json(r)}};
  bool pass = r.all_contain_zero;
  if (const auto c = p.maybe_child("control")) {
    ex::StationarityPlan broken = plan;
    broken.enforce_dbc = false;
    broken.mu = c->number("mu", plan.mu);
    broken.intensity = c->number("intensity", plan.intensity);
    broken.seed = ctx.seed + 1;
    const auto rc = ex::stationarity_test(broken);
    s["control"] = stationarity_json(rc);
    s["control"]["mu"] = broken.mu;
    pass = pass && rc.none_contain_zero;
  }
  (void)out;
  return {s, pass};
}

CommandResult run_slivnyak(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::SlivnyakPlan plan;
  if (p.has("window")) {
    const auto w = p.numbers("window");
    if (w.size() != 2) p.fail("expected [lo, hi] for", "window");
    plan.window = SpatialDomain::box(1, w[0], w[1]);
  }
  if (p.has("set")) {
    const auto b = p.numbers("set");
    if (b.size() != 2) p.fail("expected [lo, hi] for", "set");
    plan.set = SpatialDomain::box(1, b[0], b[1]);
  }
  plan.intensity = p.number("intensity", plan.intensity);
  plan.replicates = p.count("replicates", plan.replicates);
  plan.seed = ctx.seed;
  plan.threads = ctx.threads;
  const auto r = ex::slivnyak_check(plan);
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"h", ex::to_string(row.h)},
                    {"lhs", summary_json(row.lhs)},
                    {"rhs", summary_json(row.rhs)},
                    {"exact", row.exact},
                    {"intervals_overlap", row.intervals_overlap},
                    {"exact_in_lhs", row.exact_in_lhs}});
  }
  Json s{{"experiment", "slivnyak"}, {"lambda", r.lambda}, {"replicates", plan.replicates},
         {"rows", rows}};
  (void)out;
  return {s, r.all_agree};
}

CommandResult run_extinction(const RunContext& ctx, OutputDir& out) {
  const Section root(ctx.config, "");
  const YAML::Node list = root.node()["cases"];
  if (!list || !list.IsSequence() || list.size() == 0) root.fail("expected a nonempty list", "cases");
  bool pass = true;
  Json cases = Json::array();
  std::vector<PlotSpec> plots;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Section c(list[i], "cases[" + std::to_string(i) + "]");
    ex::ExtinctionPlan plan;
    plan.params = parse_model(c.child("model"));
    plan.initial = parse_initial(c.child("initial"), plan.params, ctx.seed);
    plan.replicates = c.count("replicates", plan.replicates);
    if (c.has("cap")) plan.cap = c.number("cap");
    plan.mass_dt = c.number("mass_dt", plan.mass_dt);
    plan.options.engine = parse_engine(c.text("engine", "indexed"));
    plan.seed = ctx.seed + i;
    plan.threads = ctx.threads;
    const std::string name = c.text("name", "case" + std::to_string(i));
    const auto r = ex::extinction_experiment(plan);
    const bool all_extinct = r.extinct == r.replicates;
    const bool need_oracle = c.flag("require_oracle_mean", true);
    const bool ok = all_extinct && r.mass_bound_ok && (!need_oracle || r.mean_time_within_oracle);
    pass = pass && ok;
    const std::string file = "mass_" + name + ".dat";
    out.write_table(file, {{"t", r.mass_times}, {"mean_mass", r.mean_mass},
                           {"stderr", r.mean_mass_stderr}});
    plots.push_back({"mean mass, " + name, file, "t", "mass", {{"1:2:3", "mean"}},
                     r.cubes > 0 ? std::optional(r.mass_bound) : std::nullopt, true});
    cases.push_back({{"name", name},
                     {"replicates", r.replicates},
                     {"extinct", r.extinct},
                     {"extinct_fraction", r.extinct_fraction},
                     {"mean_time", r.mean_time},
                     {"time_stderr", r.time_stderr},
                     {"median_time", r.median_time},
                     {"q90_time", r.q90_time},
                     {"max_time", r.max_time},
                     {"cap", r.cap},
                     {"cap_from_oracle", r.cap_from_oracle},
                     {"chain_kappa", r.chain_kappa},
                     {"oracle_mean_time", r.oracle_mean_time},
                     {"oracle_q99_time", r.oracle_q99_time},
                     {"mean_time_within_oracle", r.mean_time_within_oracle},
                     {"cubes", r.cubes},
                     {"x0", r.x0},
                     {"mass_bound", r.mass_bound},
                     {"sup_mean_mass", r.sup_mean_mass},
                     {"mass_bound_ok", r.mass_bound_ok},
                     {"pass", ok}});
  }
  out.write_text("plot.gp", gnuplot_script("extinction.png", plots));
  return {Json{{"experiment", "extinction"}, {"cases", cases}}, pass};
}

CommandResult run_lattice(const RunContext& ctx, OutputDir& out) {
  const Section p = plan_section(ctx);
  ex::LatticePlan plan;
  plan.dim = static_cast<int>(p.count("dim", plan.dim));
  plan.gamma = p.number("gamma", plan.gamma);
  plan.mu = p.number("mu", plan.mu);
  plan.alpha = p.number("alpha", plan.alpha);
  plan.horizon = p.number("horizon", plan.horizon);
  plan.replicates = p.count("replicates", plan.replicates);
  plan.established_sites = p.count("established_sites", plan.established_sites);
  plan.seed = ctx.seed;
  plan.threads = ctx.threads;
  const auto r = ex::lattice_survival(plan);
  Json s{{"experiment", "lattice-survival"},
         {"dim", plan.dim},
         {"lattice_survival_condition", r.condition_holds},
         {"replicates", r.replicates},
         {"horizon", plan.horizon},
         {"bpdl_survival", r.bpdl_survival},
         {"bpdl_stderr", r.bpdl_stderr},
         {"bpdl_established", r.bpdl_established},
         {"contact_survival", r.contact_survival},
         {"contact_stderr", r.contact_stderr},
         {"contact_established", r.contact_established},
         {"dominates", r.dominates},
         {"positive", r.positive}};
  (void)out;
  return {s, r.condition_holds && r.dominates && r.positive};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "scaling-c1", "scaling-c2",         "stationarity", "slivnyak",   "extinction",
      "lattice-survival", "density",      "window-count", "interaction-load",
      "engine-equivalence", "martingale", "moment"};
  return names;
}

CommandResult experiment(const std::string& name, const RunContext& ctx, OutputDir& out) {
  if (name == "scaling-c1") return run_scaling_c1(ctx, out);
  if (name == "scaling-c2") return run_scaling_c2(ctx, out);
  if (name == "stationarity") return run_stationarity(ctx, out);
  if (name == "slivnyak") return run_slivnyak(ctx, out);
  if (name == "extinction") return run_extinction(ctx, out);
  if (name == "lattice-survival") return run_lattice(ctx, out);
  if (name == "density") return run_density(ctx, out);
  if (name == "window-count") return run_window_count(ctx, out);
  if (name == "interaction-load") return run_load(ctx, out);
  if (name == "engine-equivalence") return run_engines(ctx, out);
  if (name == "martingale") return run_martingale(ctx, out);
  if (name == "moment") return run_moment(ctx, out);
  std::string names;
  for (const auto& n : experiment_names()) names += (names.empty() ? "" : ", ") + n;
  throw UnknownExperiment("'" + name + "'; valid names: " + names);
}

}  // namespace bpdl::cli
