#pragma once

#include <vector>

#include "bpdl/sim/simulator.hpp"
#include "bpdl/test_function.hpp"

namespace bpdl::stats {

/// Tracks <nu_t, g> for a list of functions and their occupation integrals
/// int_0^t <nu_s, g> ds (exact: the population is constant between events).
/// On every snapshot it appends, per function, the pair
/// (<nu_t, g>, int_0^t <nu_s, g> ds).
class FunctionalObserver : public sim::Observer {
 public:
  explicit FunctionalObserver(std::vector<TestFunction> gs) : gs_(std::move(gs)) {}

  static constexpr std::size_t kSlots = 2;

  void on_start(const sim::Simulator& s) override;
  void advance(const sim::Simulator& s, double t0, double t1) override;
  void before_event(const sim::Simulator& s, const sim::Event& e) override;
  void after_event(const sim::Simulator& s, const sim::Event& e) override;
  void on_snapshot(const sim::Simulator& s, sim::Snapshot& snap) override;

  double value(std::size_t k) const { return value_[k]; }
  double occupation(std::size_t k) const { return occupation_[k]; }

 private:
  std::vector<TestFunction> gs_;
  std::vector<double> value_;
  std::vector<double> occupation_;
};

}  // namespace bpdl::stats
