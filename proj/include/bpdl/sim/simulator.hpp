#pragma once

#include <cstdint>
#include <vector>

#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/rng.hpp"
#include "bpdl/sim/cell_index.hpp"
#include "bpdl/sim/event.hpp"
#include "bpdl/sim/sum_tree.hpp"
#include "bpdl/sim/trace.hpp"

namespace bpdl::sim {

class Simulator;

/// Hooks called from Simulator::run. advance() covers a stretch of time
/// during which the population is constant; before_event() sees the state
/// the event acts on and after_event() the state it leaves behind.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_start(const Simulator&) {}
  virtual void advance(const Simulator&, double /*t0*/, double /*t1*/) {}
  virtual void before_event(const Simulator&, const Event&) {}
  virtual void after_event(const Simulator&, const Event&) {}
  virtual void on_snapshot(const Simulator&, Snapshot&) {}
};

/// Forwards every hook to several observers, in order.
class ObserverList : public Observer {
 public:
  ObserverList() = default;
  explicit ObserverList(std::vector<Observer*> list) : list_(std::move(list)) {}
  void add(Observer* o) { list_.push_back(o); }
  void on_start(const Simulator& s) override {
    for (auto* o : list_) o->on_start(s);
  }
  void advance(const Simulator& s, double t0, double t1) override {
    for (auto* o : list_) o->advance(s, t0, t1);
  }
  void before_event(const Simulator& s, const Event& e) override {
    for (auto* o : list_) o->before_event(s, e);
  }
  void after_event(const Simulator& s, const Event& e) override {
    for (auto* o : list_) o->after_event(s, e);
  }
  void on_snapshot(const Simulator& s, Snapshot& snap) override {
    for (auto* o : list_) o->on_snapshot(s, snap);
  }

 private:
  std::vector<Observer*> list_;
};

struct RateTriple {
  double birth = 0.0;
  double natural_death = 0.0;
  double competition_death = 0.0;

  double total() const { return birth + natural_death + competition_death; }
};

struct SimOptions {
  EngineKind engine = EngineKind::automatic;
  /// automatic: the faithful engine is used while the population is at or
  /// below this size, the indexed engine above it.
  std::size_t faithful_threshold = 200;
  std::uint64_t event_cap = 100'000'000;
  bool record_log = false;
  /// Check the cached competition sums against brute force after every
  /// event (slow; for tests).
  bool debug_validate = false;
};

/// Continuous-time simulation of the birth / dispersal / competition
/// process.
///
/// The faithful engine runs clocks at the envelope rates
///   m1 = C gamma_bar N,  m2 = mu_bar N,  m3 = alpha_bar U_bar N^2
/// and thins each proposal with the ratio of true to envelope rate; rejected
/// proposals are fictitious events. The indexed engine samples from the
/// exact rates sum gamma(x_i), sum mu(x_i), sum alpha(x_i) S_i with
/// S_i = sum_j U(x_i, x_j) kept up to date through a cell index. Both
/// include the self pair j = i in S_i and sample the same law.
class Simulator {
 public:
  Simulator(ModelParams params, Population initial, Rng rng, SimOptions options = {});

  const ModelParams& params() const { return params_; }
  const Population& population() const { return pop_; }
  double time() const { return t_; }
  const EventCounters& counters() const { return counters_; }
  const SimOptions& options() const { return options_; }
  Rng& rng() { return rng_; }

  /// Envelope clock rates (m1, m2, m3) of the faithful engine.
  RateTriple event_rates() const;
  /// Exact total rates of the three effective event classes.
  RateTriple exact_rates() const;

  /// S_i (cached when the index is maintained, brute force otherwise).
  double competition_load(std::size_t i) const;

  /// Draws and applies the next event. Throws EmptyPopulation when N = 0.
  Event step();

  Trace run(const Horizon& horizon, const SnapshotSchedule& schedule = {},
            Observer* observer = nullptr);

  /// Recomputes every S_i by brute force; throws IndexStale on a mismatch
  /// beyond 1e-9 relative.
  void validate_index() const;

  /// Calls fn(j, U(y, x_j)) for every individual with a nonzero weight.
  template <class Fn>
  void for_each_neighbor(const Point& y, Fn&& fn) const {
    if (!indexed()) {
      for (std::size_t j = 0; j < pop_.size(); ++j) {
        const double u = params_.u(y, pop_[j]);
        if (u > 0.0) fn(j, u);
      }
      return;
    }
    index_.for_each_candidate(y, [&](std::uint32_t j) {
      const double u = params_.u(y, pop_[j]);
      if (u > 0.0) fn(static_cast<std::size_t>(j), u);
    });
  }

  const std::vector<Event>& event_log() const { return log_; }

 private:
  bool indexed() const { return options_.engine != EngineKind::faithful; }
  bool use_faithful_step() const;

  Event propose();
  Event propose_faithful();
  Event propose_indexed();
  void apply(const Event& e);

  void add_individual(const Point& y);
  void remove_individual(std::size_t i);
  void rebuild_cache();
  void record_snapshot(double t, bool positions, Observer* observer, Trace& trace);

  ModelParams params_;
  Population pop_;
  Rng rng_;
  SimOptions options_;
  double t_ = 0.0;
  EventCounters counters_;
  std::vector<Event> log_;

  // indexed-engine cache
  bool const_gamma_ = true;
  bool const_mu_ = true;
  bool const_alpha_ = true;
  CellIndex index_;
  std::vector<double> load_;  // S_i
  std::vector<double> g_, m_, a_;
  SumTree comp_tree_;   // alpha_i S_i
  SumTree birth_tree_;  // gamma_i, only for non-constant gamma
  SumTree death_tree_;  // mu_i, only for non-constant mu
  std::uint64_t since_refresh_ = 0;
};

}  // namespace bpdl::sim
