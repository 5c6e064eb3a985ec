#include "bpdl/sim/trace.hpp"

#include <cmath>

#include "bpdl/errors.hpp"

namespace bpdl::sim {

SnapshotSchedule SnapshotSchedule::at(std::vector<double> times, bool positions) {
  SnapshotSchedule s;
  s.times = std::move(times);
  s.positions = positions;
  return s;
}

SnapshotSchedule SnapshotSchedule::every(double dt, double t1, bool positions, double t0) {
  SnapshotSchedule s;
  s.positions = positions;
  const auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
  s.times.reserve(steps + 1);
  // index-based times avoid accumulating rounding from repeated addition
  for (std::size_t k = 0; k <= steps; ++k) s.times.push_back(t0 + static_cast<double>(k) * dt);
  return s;
}

bool Trace::has(double t) const {
  for (const Snapshot& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return true;
  }
  return false;
}

const Snapshot& Trace::at(double t) const {
  for (const Snapshot& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  }
  throw NoSnapshot("no snapshot at t = " + std::to_string(t) + " in replicate " +
                   std::to_string(replicate_id));
}

}  // namespace bpdl::sim
