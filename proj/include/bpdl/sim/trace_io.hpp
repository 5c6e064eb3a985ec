#pragma once

#include <ostream>
#include <span>

#include "bpdl/sim/trace.hpp"

namespace bpdl::sim {

/// replicate_id,t,count,births_cum,ndeaths_cum,cdeaths_cum,fictitious_cum
void write_trace_csv(std::ostream& os, std::span<const Trace> traces);

/// replicate_id,t,x_1..x_d for every snapshot that recorded positions.
void write_positions_csv(std::ostream& os, std::span<const Trace> traces);

}  // namespace bpdl::sim
