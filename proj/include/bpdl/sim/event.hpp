#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "bpdl/domain.hpp"

namespace bpdl::sim {

enum class EventKind { birth, natural_death, competition_death, fictitious, lost_seed };

std::string to_string(EventKind kind);

/// One clock ring. `index` is the parent (birth, lost_seed) or the victim
/// (deaths), valid in the population as it stood just before the event.
/// `x` is the child position for births and the victim position for deaths.
struct Event {
  EventKind kind = EventKind::fictitious;
  double time = 0.0;
  std::size_t index = 0;
  Point x{};
};

struct EventCounters {
  std::uint64_t births = 0;
  std::uint64_t natural_deaths = 0;
  std::uint64_t competition_deaths = 0;
  std::uint64_t fictitious = 0;
  std::uint64_t lost_seeds = 0;

  std::uint64_t deaths() const { return natural_deaths + competition_deaths; }
  std::uint64_t total() const {
    return births + natural_deaths + competition_deaths + fictitious + lost_seeds;
  }
  void record(EventKind kind);

  bool operator==(const EventCounters&) const = default;
};

enum class EngineKind { faithful, indexed, automatic };

std::string to_string(EngineKind kind);
EngineKind engine_kind_from_string(const std::string& name);

}  // namespace bpdl::sim
