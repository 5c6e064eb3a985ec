#pragma once

#include <vector>

#include "bpdl/meanfield/solver.hpp"

namespace bpdl::meanfield {

/// F f = gamma (f * D) / (mu + alpha (f * U)) pointwise. Throws PoleAtZero
/// where the denominator vanishes.
DensityField apply_F(const Model& model, const DensityField& f);

struct FixedPointResult {
  DensityField field;
  int iterations = 0;
  /// sup |c_k - c0| for the start and after every update.
  std::vector<double> distance_to_c0;
  /// Running minimum of the iterates (the measured eps0) after each update.
  std::vector<double> running_min;
  /// distance_to_c0[k+1] / distance_to_c0[k].
  std::vector<double> contraction;
  /// mu / (mu + alpha running_min[k]), the bound each factor must respect.
  std::vector<double> contraction_bound;
};

/// Iterates c <- F c until the sup-norm change falls below tol. Throws
/// NoConvergence after max_iters updates.
FixedPointResult fixed_point(const Model& model, const DensityField& start, double tol,
                             int max_iters);

struct AssumptionCReport {
  bool gamma_exceeds_mu = false;
  /// min over stencil offsets of gamma D(z) - (gamma - mu) U(z).
  double pointwise_margin = 0.0;
  bool pointwise_ok = false;
  /// Mass of R = D + ((gamma - mu) / mu) (D - U) by quadrature; NaN if mu = 0.
  double r_mass = 0.0;
  bool r_mass_ok = false;
  bool pass = false;
};

AssumptionCReport check_assumption_C(const Model& model, const Kernel& dispersal,
                                     const Kernel& competition);

/// Hypotheses of the uniqueness result for the constant equilibrium:
/// Assumption C, gamma > 2^d mu, alpha > 0, radial nonincreasing D.
struct UniquenessReport {
  AssumptionCReport assumption_c;
  bool gamma_exceeds_2d_mu = false;
  bool alpha_positive = false;
  bool dispersal_nonincreasing = false;
  bool pass = false;
};

UniquenessReport check_uniqueness_hypotheses(const Model& model, const Kernel& dispersal,
                                             const Kernel& competition);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> l2;  // E(t) = h^d sum (xi_t - c0)^2
  bool nonincreasing = true;
  double rate = 0.0;  // a in E(t) ~ E(0) e^{-a t}
  double r2 = 1.0;
  bool trivial = false;  // E == 0 throughout
};

/// Integrates from field0 and fits log E(t) linearly in t over `samples`
/// output times.
DecayReport l2_decay_check(const Model& model, const DensityField& field0, double T, double dt,
                           int samples = 50);

struct DetailedBalanceReport {
  /// max over grid points and output times (where the bound exceeds the
  /// absolute floor) of
  /// (xi_t - c0)^2 / ((xi_0 - c0)^2 exp(-2 alpha ((xi_0 ^ c0) * D) t)).
  double worst_ratio = 0.0;
  bool bound_holds = true;
  /// points that started below c0 never decrease, points above never
  /// increase, and none crosses c0.
  bool monotone = true;
  std::size_t checks = 0;
};

/// Pointwise exponential bound for mu = 0, D = U. `tolerance` absorbs
/// time-discretization error (relative, plus the same absolute floor).
DetailedBalanceReport dbc_bound_check(const Model& model, const DensityField& field0, double T,
                                      double dt, int samples = 50, double tolerance = 1e-9);

}  // namespace bpdl::meanfield
