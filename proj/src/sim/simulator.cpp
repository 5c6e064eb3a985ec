#include "bpdl/sim/simulator.hpp"

#include <cmath>
#include <limits>

#include "bpdl/errors.hpp"
#include "bpdl/reference.hpp"

namespace bpdl::sim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Cached sums are recomputed from scratch this often to shed rounding.
constexpr std::uint64_t kRefreshPeriod = std::uint64_t{1} << 20;
}  // namespace

Simulator::Simulator(ModelParams params, Population initial, Rng rng, SimOptions options)
    : params_(std::move(params)), pop_(std::move(initial)), rng_(rng), options_(options) {
  const_gamma_ = params_.gamma.is_constant();
  const_mu_ = params_.mu.is_constant();
  const_alpha_ = params_.alpha.is_constant();
  if (indexed()) {
    index_ = CellIndex(params_.domain, params_.competition.support_radius());
    rebuild_cache();
  }
}

void Simulator::rebuild_cache() {
  const std::size_t n = pop_.size();
  index_.clear();
  for (std::size_t i = 0; i < n; ++i) index_.insert(static_cast<std::uint32_t>(i), pop_[i]);
  load_.assign(n, 0.0);
  g_.resize(n);
  m_.resize(n);
  a_.resize(n);
  comp_tree_.clear();
  birth_tree_.clear();
  death_tree_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for_each_neighbor(pop_[i], [&](std::size_t, double u) { s += u; });
    load_[i] = s;
    g_[i] = params_.gamma(pop_[i]);
    m_[i] = params_.mu(pop_[i]);
    a_[i] = params_.alpha(pop_[i]);
    comp_tree_.push_back(a_[i] * s);
    if (!const_gamma_) birth_tree_.push_back(g_[i]);
    if (!const_mu_) death_tree_.push_back(m_[i]);
  }
  since_refresh_ = 0;
}

RateTriple Simulator::event_rates() const {
  const double n = static_cast<double>(pop_.size());
  return {params_.envelope_const * params_.gamma_bar * n, params_.mu_bar * n,
          params_.alpha_bar * params_.u_bar * n * n};
}

RateTriple Simulator::exact_rates() const {
  RateTriple r;
  const std::size_t n = pop_.size();
  if (indexed()) {
    r.birth = const_gamma_ ? params_.gamma.constant_value() * static_cast<double>(n)
                           : birth_tree_.total();
    r.natural_death =
        const_mu_ ? params_.mu.constant_value() * static_cast<double>(n) : death_tree_.total();
    r.competition_death = comp_tree_.total();
    return r;
  }
  for (std::size_t i = 0; i < n; ++i) {
    r.birth += params_.gamma(pop_[i]);
    r.natural_death += params_.mu(pop_[i]);
    r.competition_death += params_.alpha(pop_[i]) * competition_sum(pop_, pop_[i], params_);
  }
  return r;
}

double Simulator::competition_load(std::size_t i) const {
  if (indexed()) return load_[i];
  return competition_sum(pop_, pop_[i], params_);
}

bool Simulator::use_faithful_step() const {
  switch (options_.engine) {
    case EngineKind::faithful: return true;
    case EngineKind::indexed: return false;
    case EngineKind::automatic: return pop_.size() <= options_.faithful_threshold;
  }
  return false;
}

Event Simulator::propose() {
  if (pop_.empty()) throw EmptyPopulation("step called on an empty population");
  return use_faithful_step() ? propose_faithful() : propose_indexed();
}

Event Simulator::propose_faithful() {
  const RateTriple m = event_rates();
  const double total = m.total();
  Event e;
  if (!(total > 0.0)) {
    e.time = kInf;
    return e;
  }
  e.time = t_ + rng_.exponential(total);
  const double u = rng_.uniform() * total;
  const std::size_t n = pop_.size();
  if (u < m.birth) {
    // Step 1.1: parent uniform, z from the envelope, thinned by
    // gamma(x) D(z) / (gamma_bar C D_env(z)).
    const std::size_t i = rng_.index(n);
    const Point& x = pop_[i];
    const Point z = params_.envelope.sample(rng_);
    const double env = params_.envelope(z);
    const double accept = env > 0.0 ? params_.gamma(x) * params_.dispersal(z) /
                                          (params_.gamma_bar * params_.envelope_const * env)
                                    : 0.0;
    if (rng_.uniform() < accept) {
      Point y = x;
      for (int a = 0; a < params_.dim(); ++a) y[a] += z[a];
      const auto placed = params_.domain.place(y);
      e.index = i;
      if (placed) {
        e.kind = EventKind::birth;
        e.x = *placed;
      } else {
        e.kind = EventKind::lost_seed;
        e.x = y;
      }
    }
  } else if (u < m.birth + m.natural_death) {
    // Step 1.2
    const std::size_t i = rng_.index(n);
    if (rng_.uniform() < params_.mu(pop_[i]) / params_.mu_bar) {
      e.kind = EventKind::natural_death;
      e.index = i;
      e.x = pop_[i];
    }
  } else {
    // Step 1.3: (i, j) with replacement, so j = i contributes U(x, x).
    const std::size_t i = rng_.index(n);
    const std::size_t j = rng_.index(n);
    const double accept = params_.u(pop_[i], pop_[j]) * params_.alpha(pop_[i]) /
                          (params_.u_bar * params_.alpha_bar);
    if (rng_.uniform() < accept) {
      e.kind = EventKind::competition_death;
      e.index = i;
      e.x = pop_[i];
    }
  }
  return e;
}

Event Simulator::propose_indexed() {
  const RateTriple r = exact_rates();
  const double total = r.total();
  Event e;
  if (!(total > 0.0)) {
    e.time = kInf;
    return e;
  }
  e.time = t_ + rng_.exponential(total);
  double u = rng_.uniform() * total;
  const std::size_t n = pop_.size();
  if (u < r.birth) {
    const std::size_t i = const_gamma_ ? rng_.index(n) : birth_tree_.find(u);
    const auto placed = sample_dispersal(params_, pop_[i], rng_);
    e.index = i;
    if (placed) {
      e.kind = EventKind::birth;
      e.x = *placed;
    } else {
      e.kind = EventKind::lost_seed;
      e.x = pop_[i];
    }
    return e;
  }
  u -= r.birth;
  if (u < r.natural_death) {
    const std::size_t i = const_mu_ ? rng_.index(n) : death_tree_.find(u);
    e.kind = EventKind::natural_death;
    e.index = i;
    e.x = pop_[i];
    return e;
  }
  u -= r.natural_death;
  const std::size_t i = comp_tree_.find(u);
  e.kind = EventKind::competition_death;
  e.index = i;
  e.x = pop_[i];
  return e;
}

void Simulator::add_individual(const Point& y) {
  if (!indexed()) {
    pop_.add(y);
    return;
  }
  double s = params_.competition(Point{});  // the newcomer's self pair
  for_each_neighbor(y, [&](std::size_t j, double u) {
    s += u;
    load_[j] += u;
    comp_tree_.set(j, a_[j] * load_[j]);
  });
  const std::size_t i = pop_.add(y);
  index_.insert(static_cast<std::uint32_t>(i), y);
  load_.push_back(s);
  g_.push_back(params_.gamma(y));
  m_.push_back(params_.mu(y));
  a_.push_back(params_.alpha(y));
  comp_tree_.push_back(a_[i] * s);
  if (!const_gamma_) birth_tree_.push_back(g_[i]);
  if (!const_mu_) death_tree_.push_back(m_[i]);
}

void Simulator::remove_individual(std::size_t i) {
  if (!indexed()) {
    pop_.remove(i);
    return;
  }
  const Point y = pop_[i];
  index_.erase(static_cast<std::uint32_t>(i));
  for_each_neighbor(y, [&](std::size_t j, double u) {
    load_[j] -= u;
    comp_tree_.set(j, a_[j] * load_[j]);
  });
  const std::size_t last = pop_.remove(i);
  if (last != i) {
    index_.relabel(static_cast<std::uint32_t>(last), static_cast<std::uint32_t>(i));
    load_[i] = load_[last];
    g_[i] = g_[last];
    m_[i] = m_[last];
    a_[i] = a_[last];
    comp_tree_.set(i, comp_tree_.get(last));
    if (!const_gamma_) birth_tree_.set(i, birth_tree_.get(last));
    if (!const_mu_) death_tree_.set(i, death_tree_.get(last));
  }
  load_.pop_back();
  g_.pop_back();
  m_.pop_back();
  a_.pop_back();
  comp_tree_.pop_back();
  if (!const_gamma_) birth_tree_.pop_back();
  if (!const_mu_) death_tree_.pop_back();
}

void Simulator::apply(const Event& e) {
  counters_.record(e.kind);
  switch (e.kind) {
    case EventKind::birth: add_individual(e.x); break;
    case EventKind::natural_death:
    case EventKind::competition_death: remove_individual(e.index); break;
    case EventKind::fictitious:
    case EventKind::lost_seed: break;
  }
  if (options_.record_log && e.kind != EventKind::fictitious) log_.push_back(e);
  if (indexed() && ++since_refresh_ >= kRefreshPeriod) rebuild_cache();
  if (options_.debug_validate) validate_index();
}

Event Simulator::step() {
  Event e = propose();
  if (!std::isfinite(e.time)) return e;
  t_ = e.time;
  apply(e);
  return e;
}

void Simulator::validate_index() const {
  if (!indexed()) return;
  if (load_.size() != pop_.size() || index_.size() != pop_.size()) {
    throw IndexStale("cache size differs from population size");
  }
  for (std::size_t i = 0; i < pop_.size(); ++i) {
    const double exact = competition_sum(pop_, pop_[i], params_);
    if (std::abs(load_[i] - exact) > 1e-9 * std::max(1.0, std::abs(exact))) {
      throw IndexStale("cached competition sum " + std::to_string(load_[i]) + " for individual " +
                       std::to_string(i) + " differs from brute force " + std::to_string(exact));
    }
    const double w = params_.alpha(pop_[i]) * exact;
    if (std::abs(comp_tree_.get(i) - w) > 1e-9 * std::max(1.0, std::abs(w))) {
      throw IndexStale("competition rate tree out of date at individual " + std::to_string(i));
    }
  }
}

void Simulator::record_snapshot(double t, bool positions, Observer* observer, Trace& trace) {
  Snapshot s;
  s.t = t;
  s.count = pop_.size();
  s.counters = counters_;
  if (positions) s.coords = pop_.flatten();
  if (observer) observer->on_snapshot(*this, s);
  trace.snapshots.push_back(std::move(s));
}

Trace Simulator::run(const Horizon& horizon, const SnapshotSchedule& schedule,
                     Observer* observer) {
  Trace trace;
  trace.engine = options_.engine;
  trace.dim = params_.dim();
  trace.initial_count = pop_.size();
  trace.snapshots.reserve(schedule.times.size());

  const double t_end = horizon.t_max;
  const auto& times = schedule.times;
  std::size_t next = 0;
  double t_obs = t_;
  auto advance_to = [&](double t) {
    if (observer && t > t_obs) observer->advance(*this, t_obs, t);
    t_obs = std::max(t_obs, t);
  };
  // records every scheduled time below `limit` (or equal to it when
  // `inclusive`) that lies within the horizon
  auto flush = [&](double limit, bool inclusive) {
    while (next < times.size() && (times[next] < limit || (inclusive && times[next] == limit)) &&
           times[next] <= t_end) {
      advance_to(times[next]);
      record_snapshot(times[next], schedule.positions, observer, trace);
      ++next;
    }
  };

  if (observer) observer->on_start(*this);
  std::uint64_t events = 0;
  for (;;) {
    if (pop_.empty()) {
      trace.extinct = true;
      trace.extinction_time = t_;
      flush(kInf, true);
      break;
    }
    if (horizon.kind == Horizon::Kind::until_events && events >= horizon.max_events) {
      flush(t_, true);
      break;
    }
    const Event e = propose();
    if (e.time > t_end || !std::isfinite(e.time)) {
      // exponential clocks are memoryless, so dropping the overshooting
      // proposal leaves the law of the continuation intact
      flush(t_end, true);
      if (std::isfinite(t_end)) {
        advance_to(t_end);
        t_ = t_end;
      }
      break;
    }
    flush(e.time, false);
    advance_to(e.time);
    t_ = e.time;
    if (observer) observer->before_event(*this, e);
    apply(e);
    if (observer) observer->after_event(*this, e);
    if (++events > options_.event_cap) {
      throw BudgetExceeded("event cap of " + std::to_string(options_.event_cap) +
                           " exceeded at t = " + std::to_string(t_) +
                           " with population " + std::to_string(pop_.size()));
    }
  }
  trace.counters = counters_;
  trace.events = events;
  trace.final_time = t_;
  if (options_.record_log) trace.log = log_;
  return trace;
}

}  // namespace bpdl::sim
