#include "bpdl/stats/functionals.hpp"

namespace bpdl::stats {

void FunctionalObserver::on_start(const sim::Simulator& s) {
  value_.assign(gs_.size(), 0.0);
  occupation_.assign(gs_.size(), 0.0);
  for (std::size_t k = 0; k < gs_.size(); ++k) {
    for (const Point& x : s.population().positions()) value_[k] += gs_[k](x);
  }
}

void FunctionalObserver::advance(const sim::Simulator&, double t0, double t1) {
  for (std::size_t k = 0; k < gs_.size(); ++k) occupation_[k] += (t1 - t0) * value_[k];
}

void FunctionalObserver::before_event(const sim::Simulator&, const sim::Event& e) {
  if (e.kind != sim::EventKind::natural_death && e.kind != sim::EventKind::competition_death) {
    return;
  }
  for (std::size_t k = 0; k < gs_.size(); ++k) value_[k] -= gs_[k](e.x);
}

void FunctionalObserver::after_event(const sim::Simulator&, const sim::Event& e) {
  if (e.kind != sim::EventKind::birth) return;
  for (std::size_t k = 0; k < gs_.size(); ++k) value_[k] += gs_[k](e.x);
}

void FunctionalObserver::on_snapshot(const sim::Simulator&, sim::Snapshot& snap) {
  for (std::size_t k = 0; k < gs_.size(); ++k) {
    snap.observables.push_back(value_[k]);
    snap.observables.push_back(occupation_[k]);
  }
}

}  // namespace bpdl::stats
