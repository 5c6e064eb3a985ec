#include "bpdl/sim/event.hpp"

#include "bpdl/errors.hpp"

namespace bpdl::sim {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::birth: return "birth";
    case EventKind::natural_death: return "natural_death";
    case EventKind::competition_death: return "competition_death";
    case EventKind::fictitious: return "fictitious";
    case EventKind::lost_seed: return "lost_seed";
  }
  return "?";
}

void EventCounters::record(EventKind kind) {
  switch (kind) {
    case EventKind::birth: ++births; break;
    case EventKind::natural_death: ++natural_deaths; break;
    case EventKind::competition_death: ++competition_deaths; break;
    case EventKind::fictitious: ++fictitious; break;
    case EventKind::lost_seed: ++lost_seeds; break;
  }
}

std::string to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::faithful: return "faithful";
    case EngineKind::indexed: return "indexed";
    case EngineKind::automatic: return "automatic";
  }
  return "?";
}

EngineKind engine_kind_from_string(const std::string& name) {
  if (name == "faithful") return EngineKind::faithful;
  if (name == "indexed") return EngineKind::indexed;
  if (name == "automatic" || name == "auto") return EngineKind::automatic;
  throw BadConfig("engine: unknown engine '" + name + "' (faithful, indexed, automatic)");
}

}  // namespace bpdl::sim
