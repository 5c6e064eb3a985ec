#include "bpdl/sim/trace_io.hpp"

#include <iomanip>

namespace bpdl::sim {

void write_trace_csv(std::ostream& os, std::span<const Trace> traces) {
  os << std::setprecision(17);
  os << "replicate_id,t,count,births_cum,ndeaths_cum,cdeaths_cum,fictitious_cum\n";
  for (const Trace& tr : traces) {
    for (const Snapshot& s : tr.snapshots) {
      os << tr.replicate_id << ',' << s.t << ',' << s.count << ',' << s.counters.births << ','
         << s.counters.natural_deaths << ',' << s.counters.competition_deaths << ','
         << s.counters.fictitious << '\n';
    }
  }
}

void write_positions_csv(std::ostream& os, std::span<const Trace> traces) {
  os << std::setprecision(17);
  const int d = traces.empty() ? 1 : traces.front().dim;
  os << "replicate_id,t";
  for (int a = 1; a <= d; ++a) os << ",x_" << a;
  os << '\n';
  for (const Trace& tr : traces) {
    for (const Snapshot& s : tr.snapshots) {
      const std::size_t n = s.coords.size() / static_cast<std::size_t>(tr.dim);
      for (std::size_t i = 0; i < n; ++i) {
        os << tr.replicate_id << ',' << s.t;
        for (int a = 0; a < tr.dim; ++a) os << ',' << s.coords[i * tr.dim + a];
        os << '\n';
      }
    }
  }
}

}  // namespace bpdl::sim
