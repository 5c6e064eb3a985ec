#pragma once

#include <cstdint>
#include <vector>

#include "bpdl/params.hpp"
#include "bpdl/sim/simulator.hpp"
#include "bpdl/test_function.hpp"

namespace bpdl::stats {

/// Accumulates, along a simulated path, the compensated process
///   M_t^f = <nu_t, f> - <nu_0, f> - int_0^t sum_i gamma(x_i) (D f)(x_i) ds
///           + int_0^t sum_i f(x_i) [mu(x_i) + alpha(x_i) S_i] ds
/// and its predictable bracket
///   <M^f>_t = int_0^t sum_i { gamma(x_i) (D f^2)(x_i) + f^2(x_i) [mu + alpha S_i] } ds
/// for a list of test functions. The integrands are piecewise constant
/// between events, so the time integrals are exact. On every snapshot it
/// appends, per test function, the triple (<nu_t, f>, M_t^f, <M^f>_t).
class MartingaleObserver : public sim::Observer {
 public:
  MartingaleObserver(const ModelParams& params, std::vector<TestFunction> fs);

  static constexpr std::size_t kSlots = 3;

  void on_start(const sim::Simulator& s) override;
  void advance(const sim::Simulator& s, double t0, double t1) override;
  void before_event(const sim::Simulator& s, const sim::Event& e) override;
  void after_event(const sim::Simulator& s, const sim::Event& e) override;
  void on_snapshot(const sim::Simulator& s, sim::Snapshot& snap) override;

  double value(std::size_t k) const { return acc_[k].nu_f; }
  double martingale(std::size_t k) const;
  double bracket(std::size_t k) const { return acc_[k].bracket; }

 private:
  struct Acc {
    double nu_f0 = 0.0;
    double nu_f = 0.0;    // <nu, f>
    double birth = 0.0;   // sum_i gamma (D f)
    double birth2 = 0.0;  // sum_i gamma (D f^2)
    double death = 0.0;   // sum_i f mu
    double death2 = 0.0;  // sum_i f^2 mu
    double comp = 0.0;    // sum_ij f(x_i) alpha(x_i) U(x_i, x_j)
    double comp2 = 0.0;   // same with f^2
    double compensator = 0.0;
    double bracket = 0.0;
  };
  struct Contribution {
    double f, f2, gdf, gdf2, fmu, f2mu, wa, wa2;  // wa = f alpha, wa2 = f^2 alpha
  };

  Contribution contribution(std::size_t k, const Point& x) const;
  // sum over j (including y itself) of (w(y) + w(x_j)) U(y, x_j) - w(y) U(0):
  // the change of sum_ij w(x_i) U(x_i, x_j) when y joins (or leaves).
  void pair_delta(const sim::Simulator& s, const Point& y, std::vector<double>& d1,
                  std::vector<double>& d2) const;
  void rebuild(const sim::Simulator& s);

  ModelParams params_;
  std::vector<TestFunction> fs_;
  std::vector<Acc> acc_;
  std::vector<std::vector<Contribution>> per_;  // [k][i], mirrors the population order
  double u0_ = 0.0;
  std::uint64_t since_rebuild_ = 0;
};

struct MartingaleSummary {
  double t = 0.0;
  double mean = 0.0;         // ensemble mean of M_t^f
  double stderr_ = 0.0;
  double variance = 0.0;     // ensemble variance of M_t^f
  double mean_bracket = 0.0;
  /// variance / mean_bracket; NaN (reported as NA) when the bracket
  /// vanishes, e.g. for f = 0.
  double ratio = 0.0;
  std::size_t n_replicates = 0;
};

/// Reads the triples written by a MartingaleObserver (test function `k`)
/// from the snapshots at time t.
MartingaleSummary martingale_residual(const std::vector<sim::Trace>& traces, double t,
                                      std::size_t k = 0, std::size_t first_slot = 0);

}  // namespace bpdl::stats
