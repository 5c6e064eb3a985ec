#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bpdl/params.hpp"
#include "bpdl/sim/simulator.hpp"
#include "bpdl/test_function.hpp"

namespace bpdl::experiments {

/// Mean-field regime: gamma_n = gamma, mu_n = mu, alpha_n = alpha / n.
/// X^n = nu^n / n starts from round(n m0) independent points drawn from the
/// normalized initial shape.
struct MeanFieldScalingPlan {
  ModelParams base;  // constant rates on a torus
  std::vector<std::size_t> ladder{50, 100, 200, 400};
  double horizon = 2.0;
  double snapshot_dt = 0.1;
  std::size_t replicates = 200;
  double initial_mass = 1.0;
  /// Unnormalized initial shape on the torus and an upper bound for it;
  /// empty means uniform.
  std::function<double(const Point&)> initial_shape;
  double initial_shape_bound = 1.0;
  std::vector<TestFunction> observables{TestFunction::constant(1.0)};
  std::size_t grid_nodes = 256;
  double solver_dt = 0.01;
  std::uint64_t seed = 1;
  int threads = 0;
  sim::SimOptions options;
};

struct MeanFieldScalingRow {
  std::size_t n = 0;
  std::size_t replicates = 0;
  /// per observable: sqrt(mean over replicates of sup_t |<X^n_t, f> - <xi_t, f>|^2)
  std::vector<double> rms;
  std::vector<double> rms_stderr;
};

struct MeanFieldScalingReport {
  std::vector<double> times;
  /// <xi_t, f> per observable and snapshot time, from the grid solver.
  std::vector<std::vector<double>> limit;
  std::vector<MeanFieldScalingRow> rows;
  /// per observable: RMS strictly decreasing along the ladder.
  std::vector<bool> strictly_decreasing;
  /// per observable: RMS at the last rung over RMS at the first.
  std::vector<double> final_over_initial;
};

MeanFieldScalingReport scaling_meanfield(const MeanFieldScalingPlan& plan);

/// Superprocess regime on R (d = 1): gamma_n = n gamma + beta,
/// mu_n = n gamma, alpha_n = alpha / n, D_n Gaussian of variance sigma / n.
/// X^n_0 puts mass 1/n on n independent uniform points of [-a, a].
struct SuperprocessPlan {
  double gamma = 1.0;
  double beta = 0.0;
  double alpha = 1.0;
  double sigma = 1.0;
  double u_radius = 0.5;  // U = 1{|x - y| <= u_radius}
  double initial_half_width = 1.0;
  std::vector<std::size_t> ladder{25, 50, 100, 200};
  double horizon = 1.0;
  std::size_t replicates = 1000;
  /// Test functions; their squares are tracked separately.
  std::vector<TestFunction> observables{TestFunction::constant(1.0),
                                        TestFunction::triangle(0.0, 2.0)};
  std::uint64_t seed = 1;
  int threads = 0;
  sim::SimOptions options;
};

struct SuperprocessRow {
  std::size_t n = 0;
  std::size_t replicates = 0;
  /// per observable: Var(M^{n,f}_t) / mean <M^{n,f}>_t (finite-n bracket)
  std::vector<double> finite_ratio;
  /// per observable: Var(M^{n,f}_t) / (2 gamma mean int_0^t <X^n_s, f^2> ds)
  std::vector<double> limit_ratio;
  /// per observable: mean M^{n,f}_t and its standard error
  std::vector<double> mean_martingale;
  std::vector<double> mean_martingale_stderr;
  /// mean drift of the mass, int_0^t of the compensator integrand, per
  /// output time (only for beta = 0 and f = 1 this must be nonincreasing)
  bool drift_nonincreasing = true;
};

struct SuperprocessReport {
  std::vector<SuperprocessRow> rows;
  /// per observable: |limit_ratio - 1| at the last rung <= at the first.
  std::vector<bool> trend_toward_one;
};

/// Parameters of the superprocess-regime model at scale n.
ModelParams superprocess_params(const SuperprocessPlan& plan, std::size_t n);

SuperprocessReport scaling_superprocess(const SuperprocessPlan& plan);

}  // namespace bpdl::experiments
