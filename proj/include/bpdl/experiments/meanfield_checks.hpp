#pragma once

#include <cstddef>
#include <vector>

#include "bpdl/meanfield/equilibrium.hpp"
#include "bpdl/meanfield/solver.hpp"

namespace bpdl::experiments {

/// Solver checks on the reference rates (gamma = 5, mu = 1, alpha = 1) on a
/// torus: a uniform start against the logistic closed form, the Runge-Kutta
/// order from a dt halving, and the mass decay bound for gamma < mu.
struct SolverCheckPlan {
  double side = 20.0;
  std::size_t nodes = 200;
  double initial = 1.0;
  double horizon = 2.0;
  double dt = 0.01;
  double logistic_tolerance = 1e-6;
  /// Order study: coarse grid, small start so the error is not negligible.
  std::size_t order_nodes = 50;
  double order_initial = 0.2;
  double order_lo = 12.0;
  double order_hi = 20.0;
  /// Decay study: gamma = 1, mu = 2, alpha = 1.
  double decay_horizon = 4.0;
  /// Relative slack for rounding in the decay comparison.
  double decay_slack = 1e-12;
};

struct SolverCheckReport {
  std::vector<double> times;
  std::vector<double> intensity;  // mass / volume at every step
  std::vector<double> closed_form;
  double logistic_max_error = 0.0;
  bool logistic_ok = false;
  double order_error_coarse = 0.0;
  double order_error_fine = 0.0;
  double order_ratio = 0.0;
  bool order_ok = false;
  std::vector<double> decay_times;
  std::vector<double> decay_mass;
  std::vector<double> decay_bound;
  double decay_worst_ratio = 0.0;  // max mass / bound
  bool decay_ok = false;
  bool pass = false;
};

/// Logistic solution K n0 e^{rt} / (K + n0 (e^{rt} - 1)).
double logistic_solution(double n0, double r, double K, double t);

SolverCheckReport solver_check(const SolverCheckPlan& plan);

/// The constant equilibrium as a fixed point of F f = gamma (f * D) /
/// (mu + alpha (f * U)) with gamma = 3, mu = 1, alpha = 1, D ~ N(0, 1),
/// U ~ N(0, 1/2), started from c0 (1 + amp sin(2 pi x / L)).
struct FixedPointPlan {
  double side = 20.0;
  std::size_t nodes = 400;
  double amplitude = 0.3;
  double tolerance = 1e-12;
  int max_iters = 500;
  /// Below this distance rounding dominates the contraction factor.
  double contraction_floor = 1e-9;
};

struct FixedPointCheck {
  double c0 = 0.0;
  double f_residual = 0.0;  // sup |F c0 - c0|
  bool f_ok = false;        // <= 1e-12
  meanfield::UniquenessReport hypotheses;
  meanfield::FixedPointResult run;
  double final_distance = 0.0;
  bool converged = false;
  double worst_contraction_margin = 0.0;  // max(factor - bound) above the floor
  bool contraction_ok = false;
  bool pass = false;
};

FixedPointCheck fixed_point_check(const FixedPointPlan& plan);

/// Convergence to the constant equilibrium: the pointwise bound under
/// detailed balance (mu = 0, D = U annulus 0.25..0.75, gamma = 2,
/// alpha = 1/2) and the decay of E(t) = int (xi_t - c0)^2 with Gaussian
/// D = U (gamma = 3, mu = 1, alpha = 1).
struct DecayPlan {
  double side = 20.0;
  std::size_t nodes = 400;
  double dbc_horizon = 5.0;
  double l2_horizon = 5.0;
  double dt = 0.01;
  int samples = 50;
  double min_r2 = 0.95;
};

struct DecayCheck {
  meanfield::DetailedBalanceReport dbc;
  meanfield::DecayReport l2;
  bool l2_ok = false;
  bool pass = false;
};

DecayCheck decay_check(const DecayPlan& plan);

}  // namespace bpdl::experiments
