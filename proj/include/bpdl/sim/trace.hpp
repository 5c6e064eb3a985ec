#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bpdl/population.hpp"
#include "bpdl/sim/event.hpp"

namespace bpdl::sim {

/// State summary at a scheduled time.
struct Snapshot {
  double t = 0.0;
  std::size_t count = 0;
  EventCounters counters;
  std::vector<double> coords;       // flattened positions, empty unless recorded
  std::vector<double> observables;  // filled by observers

  Population population(int dim) const { return Population::unflatten(dim, coords); }
};

struct SnapshotSchedule {
  std::vector<double> times;  // nondecreasing
  bool positions = false;

  static SnapshotSchedule none() { return {}; }
  static SnapshotSchedule at(std::vector<double> times, bool positions = false);
  /// t0, t0 + dt, ... up to and including t1 (within rounding).
  static SnapshotSchedule every(double dt, double t1, bool positions = false, double t0 = 0.0);
};

struct Horizon {
  enum class Kind { until_time, until_events, until_extinct };
  Kind kind = Kind::until_time;
  double t_max = std::numeric_limits<double>::infinity();
  std::uint64_t max_events = 0;

  static Horizon until_time(double t) { return {Kind::until_time, t, 0}; }
  static Horizon until_events(std::uint64_t k) {
    return {Kind::until_events, std::numeric_limits<double>::infinity(), k};
  }
  /// Runs to extinction, censored at `cap` when it is finite.
  static Horizon until_extinct(double cap = std::numeric_limits<double>::infinity()) {
    return {Kind::until_extinct, cap, 0};
  }
};

/// Output of one replicate run.
struct Trace {
  std::uint64_t replicate_id = 0;
  std::uint64_t master_seed = 0;
  EngineKind engine = EngineKind::indexed;
  int dim = 1;
  std::size_t initial_count = 0;
  std::vector<Snapshot> snapshots;
  EventCounters counters;
  std::uint64_t events = 0;
  double final_time = 0.0;
  bool extinct = false;
  double extinction_time = std::numeric_limits<double>::quiet_NaN();
  std::vector<Event> log;  // only when event logging is enabled

  /// Snapshot recorded at time t (exact match up to 1e-9). Throws NoSnapshot.
  const Snapshot& at(double t) const;
  bool has(double t) const;
};

}  // namespace bpdl::sim
