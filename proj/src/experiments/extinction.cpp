#include "bpdl/experiments/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "bpdl/errors.hpp"
#include "bpdl/experiments/oracles.hpp"
#include "bpdl/sim/fleet.hpp"
#include "bpdl/stats/hypothesis.hpp"

namespace bpdl::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pointwise lower bound of a rate field.
double rate_floor(const RateField& f) {
  if (f.is_constant()) return f.constant_value();
  if (f.is_tabulated()) {
    const auto& v = f.table_values();
    return *std::min_element(v.begin(), v.end());
  }
  return 0.0;
}

double quantile_sorted(const std::vector<double>& xs, double q) {
  if (xs.empty()) return kNaN;
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

// Lattice sites are packed 21 bits per axis (|coordinate| < 2^20).
std::uint64_t site_key(const Point& x, int dim) {
  std::uint64_t key = 0;
  for (int a = 0; a < dim; ++a) {
    const auto c = static_cast<std::int64_t>(std::llround(x[a])) + (1 << 20);
    key |= static_cast<std::uint64_t>(c) << (21 * a);
  }
  return key;
}

std::size_t distinct_sites(const Population& pop) {
  std::vector<std::uint64_t> keys;
  keys.reserve(pop.size());
  for (const Point& x : pop.positions()) keys.push_back(site_key(x, pop.dim()));
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

std::size_t cube_count(const SpatialDomain& torus, double delta) {
  if (!torus.periodic()) throw BadConfig("cube count needs a torus");
  if (!(delta > 0.0)) throw BadConfig("cube diagonal must be positive");
  const int d = torus.dim();
  const double side = delta / std::sqrt(static_cast<double>(d));
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) {
    // guard against L / side landing a rounding error above an integer
    const double q = torus.side(a) / side;
    n *= static_cast<std::size_t>(std::ceil(q - 1e-12 * q));
  }
  return n;
}

CompetitionFloor competition_floor(const Kernel& u) {
  switch (u.shape()) {
    case KernelShape::tophat: return {u.height(), u.inner()};
    case KernelShape::gaussian: {
      const double sd = std::sqrt(u.variance());
      return {u.at_radius(sd), sd};
    }
    case KernelShape::tabulated: {
      // linear between radii, so the first segment stays above min(v0, v1)
      const auto& r = u.table_radii();
      const auto& v = u.table_values();
      if (r.size() >= 2 && v[0] > 0.0 && v[1] > 0.0) return {std::min(v[0], v[1]), r[1]};
      break;
    }
    default: break;
  }
  throw BadConfig("competition kernel has no floor epsilon 1{|z| <= delta} near the origin");
}

double mass_bound_x0(double rate_gap, double alpha0, double epsilon, std::size_t cubes) {
  if (!(alpha0 > 0.0 && epsilon > 0.0)) throw BadConfig("mass bound needs alpha0, epsilon > 0");
  return rate_gap * static_cast<double>(cubes) / (alpha0 * epsilon);
}

ExtinctionReport extinction_experiment(const ExtinctionPlan& plan) {
  const ModelParams& p = plan.params;
  if (plan.replicates < 2) throw BadConfig("extinction experiment needs at least two replicates");
  if (plan.initial.dim() != p.dim()) throw BadConfig("initial population has the wrong dimension");
  ExtinctionReport rep;
  rep.replicates = plan.replicates;
  const std::size_t n0 = plan.initial.size();
  const double mu_min = rate_floor(p.mu);
  const double alpha0 = rate_floor(p.alpha);

  // compact mode: cube count, competition floor and the mass bound
  rep.x0 = kNaN;
  rep.mass_bound = kNaN;
  if (p.domain.periodic()) {
    const CompetitionFloor fl = plan.floor ? *plan.floor : competition_floor(p.competition);
    rep.cubes = cube_count(p.domain, fl.delta);
    if (alpha0 > 0.0) {
      rep.chain_kappa = alpha0 * fl.epsilon / static_cast<double>(rep.cubes);
      const double gap = p.constant_rates()
                             ? std::abs(p.gamma.constant_value() - p.mu.constant_value())
                             : p.gamma_bar + p.mu_bar;
      rep.x0 = mass_bound_x0(gap, alpha0, fl.epsilon, rep.cubes);
      rep.mass_bound = std::max(static_cast<double>(n0), rep.x0);
    }
  }

  // dominating birth-death chain
  const bool chain_ok = n0 > 0 && (rep.chain_kappa > 0.0 || p.gamma_bar < mu_min);
  if (chain_ok) {
    // truncation far above both the start and the chain's equilibrium; the
    // uniformization cost grows like n_max^2 with competition
    std::size_t n_max = std::max<std::size_t>(10 * n0, 100);
    if (rep.chain_kappa > 0.0) {
      const double k = std::max(0.0, p.gamma_bar - mu_min) / rep.chain_kappa;
      n_max = std::max(2 * n0, static_cast<std::size_t>(2.0 * k)) + 30;
    }
    const BirthDeathChain chain = BirthDeathChain::logistic(p.gamma_bar, mu_min, rep.chain_kappa, n_max);
    rep.oracle_mean_time = chain.mean_extinction_time(n0);
    rep.oracle_q99_time = chain.extinction_quantile(n0, 0.99);
  } else {
    rep.oracle_mean_time = kNaN;
    rep.oracle_q99_time = kNaN;
  }
  if (plan.cap) {
    rep.cap = *plan.cap;
  } else {
    if (!chain_ok) throw BadConfig("no dominating chain for an adaptive cap; give an explicit cap");
    rep.cap = 10.0 * rep.oracle_q99_time;
    rep.cap_from_oracle = true;
  }
  if (!(rep.cap > 0.0) || !std::isfinite(rep.cap)) throw BadConfig("extinction cap must be finite and positive");

  const sim::SnapshotSchedule schedule = sim::SnapshotSchedule::every(plan.mass_dt, rep.cap);
  struct Run {
    bool extinct = false;
    double time = 0.0;
    std::vector<double> counts;
  };
  const auto runs = sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
    sim::Simulator s(p, plan.initial, Rng::stream(plan.seed, id), plan.options);
    const sim::Trace tr = s.run(sim::Horizon::until_extinct(rep.cap), schedule);
    Run r;
    r.extinct = tr.extinct;
    r.time = tr.extinct ? tr.extinction_time : tr.final_time;
    for (const auto& snap : tr.snapshots) r.counts.push_back(static_cast<double>(snap.count));
    return r;
  });

  std::vector<double> times;
  for (const Run& r : runs) {
    if (r.extinct) times.push_back(r.time);
  }
  rep.extinct = times.size();
  rep.extinct_fraction = static_cast<double>(rep.extinct) / static_cast<double>(plan.replicates);
  if (times.size() >= 2) {
    const stats::Summary s = stats::summarize(times);
    rep.mean_time = s.mean;
    rep.time_stderr = s.stderr_;
  } else {
    rep.mean_time = times.empty() ? kNaN : times.front();
    rep.time_stderr = kNaN;
  }
  std::sort(times.begin(), times.end());
  rep.median_time = quantile_sorted(times, 0.5);
  rep.q90_time = quantile_sorted(times, 0.9);
  rep.max_time = times.empty() ? kNaN : times.back();
  rep.mean_time_within_oracle =
      chain_ok && rep.extinct == plan.replicates &&
      rep.mean_time <= rep.oracle_mean_time + 3.0 * rep.time_stderr;

  rep.mass_times = schedule.times;
  const std::size_t nt = rep.mass_times.size();
  for (std::size_t i = 0; i < nt; ++i) {
    std::vector<double> xs;
    xs.reserve(runs.size());
    for (const Run& r : runs) xs.push_back(i < r.counts.size() ? r.counts[i] : 0.0);
    const stats::Summary s = stats::summarize(xs);
    rep.mean_mass.push_back(s.mean);
    rep.mean_mass_stderr.push_back(s.stderr_);
    rep.sup_mean_mass = std::max(rep.sup_mean_mass, s.mean);
    if (std::isfinite(rep.mass_bound) && s.mean - rep.mass_bound > 3.0 * s.stderr_) {
      rep.mass_bound_ok = false;
    }
  }
  return rep;
}

bool lattice_survival_condition(double gamma, double mu, double alpha, int dim) {
  return gamma * std::pow(2.0, -dim) / (mu + alpha) > 2.0;
}

ModelParams lattice_params(const LatticePlan& plan) {
  ParamSpec s;
  s.gamma = RateField::constant(plan.gamma);
  s.mu = RateField::constant(plan.mu);
  s.alpha = RateField::constant(plan.alpha);
  s.competition = Kernel::lattice_point(plan.dim);
  s.dispersal = Kernel::lattice_nn(plan.dim);
  s.domain = SpatialDomain::lattice(plan.dim);
  return make_params(s);
}

ContactRun run_contact_process(int dim, double lambda_d, double lambda_m, double horizon,
                               std::size_t established_sites, Rng& rng) {
  // Each occupied site rings at lambda_m + 2d lambda_d: a death with
  // probability lambda_m / total, else an infection attempt on a uniform
  // neighbour that succeeds when the neighbour is empty.
  std::vector<Point> sites{Point{}};
  std::unordered_map<std::uint64_t, std::size_t> where{{site_key(Point{}, dim), 0}};
  const double per_site = lambda_m + 2.0 * dim * lambda_d;
  const double p_death = lambda_m / per_site;
  ContactRun run;
  double t = 0.0;
  for (;;) {
    if (sites.empty()) break;
    if (sites.size() >= established_sites) {
      run.established = true;
      break;
    }
    t += rng.exponential(per_site * static_cast<double>(sites.size()));
    if (t > horizon) break;
    const std::size_t i = rng.index(sites.size());
    if (rng.uniform() < p_death) {
      where.erase(site_key(sites[i], dim));
      if (i + 1 != sites.size()) {
        sites[i] = sites.back();
        where[site_key(sites[i], dim)] = i;
      }
      sites.pop_back();
    } else {
      Point y = sites[i];
      const auto nb = rng.index(2 * static_cast<std::uint64_t>(dim));
      y[nb / 2] += (nb % 2 == 0) ? -1.0 : 1.0;
      const std::uint64_t key = site_key(y, dim);
      if (where.find(key) == where.end()) {
        where.emplace(key, sites.size());
        sites.push_back(y);
      }
    }
  }
  run.alive = !sites.empty();
  run.final_time = std::min(t, horizon);
  run.occupied = sites.size();
  return run;
}

LatticeReport lattice_survival(const LatticePlan& plan) {
  if (plan.dim < 1 || plan.dim > 3) throw BadConfig("lattice survival runs in d = 1..3");
  if (plan.replicates < 2) throw BadConfig("lattice survival needs at least two replicates");
  if (plan.established_sites < 2) throw BadConfig("establishment threshold must be at least 2 sites");
  LatticeReport rep;
  rep.condition_holds = lattice_survival_condition(plan.gamma, plan.mu, plan.alpha, plan.dim);
  rep.replicates = plan.replicates;
  const ModelParams p = lattice_params(plan);
  sim::SimOptions opts;
  opts.engine = sim::EngineKind::indexed;
  const double lambda_d = plan.gamma * std::pow(2.0, -plan.dim);
  const double lambda_m = plan.mu + plan.alpha;

  struct Pair {
    bool bpdl_alive = false;
    bool bpdl_established = false;
    bool contact_alive = false;
    bool contact_established = false;
  };
  const auto out = sim::run_fleet(plan.replicates, plan.threads, [&](std::size_t id) {
    Pair r;
    {
      sim::Simulator s(p, Population::repeated(plan.dim, Point{}, 1), Rng::stream(plan.seed, 2 * id),
                       opts);
      for (std::uint64_t k = 0;; ++k) {
        if (s.population().empty()) break;
        if ((k & 31) == 0 && distinct_sites(s.population()) >= plan.established_sites) {
          r.bpdl_established = true;
          break;
        }
        // the population is nonempty at T when the next event comes later
        if (s.step().time > plan.horizon) break;
      }
      r.bpdl_alive = !s.population().empty();
    }
    Rng rng = Rng::stream(plan.seed, 2 * id + 1);
    const ContactRun c =
        run_contact_process(plan.dim, lambda_d, lambda_m, plan.horizon, plan.established_sites, rng);
    r.contact_alive = c.alive;
    r.contact_established = c.established;
    return r;
  });

  std::vector<double> b, c;
  for (const Pair& r : out) {
    b.push_back(r.bpdl_alive ? 1.0 : 0.0);
    c.push_back(r.contact_alive ? 1.0 : 0.0);
    rep.bpdl_established += r.bpdl_established ? 1 : 0;
    rep.contact_established += r.contact_established ? 1 : 0;
  }
  const stats::Summary sb = stats::summarize(b), sc = stats::summarize(c);
  rep.bpdl_survival = sb.mean;
  rep.bpdl_stderr = sb.stderr_;
  rep.contact_survival = sc.mean;
  rep.contact_stderr = sc.stderr_;
  // independent runs: the standard error of the difference
  const double se = std::hypot(rep.bpdl_stderr, rep.contact_stderr);
  rep.dominates = rep.bpdl_survival >= rep.contact_survival - 3.0 * se;
  rep.positive = rep.bpdl_survival > 0.0;
  return rep;
}

}  // namespace bpdl::experiments
