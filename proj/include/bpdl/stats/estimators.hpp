#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/sim/trace.hpp"
#include "bpdl/stats/hypothesis.hpp"

namespace bpdl::stats {

/// Ensemble mean of the population count at one time.
struct EnsembleStat {
  double t = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double stderr_ = 0.0;  // sqrt(variance / n_replicates)
  std::size_t n_replicates = 0;
};

/// Sample mean and variance of <nu_t, 1> over replicates, or of the count
/// inside `window` when given (needs recorded positions). Throws NoSnapshot
/// when a trace has no snapshot at t and BadConfig with fewer than two
/// replicates.
EnsembleStat estimate_count(const std::vector<sim::Trace>& traces, double t,
                            const std::optional<SpatialDomain>& window = std::nullopt);

/// A pair statistic: estimate with its jackknife standard error.
struct PairTerm {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Covariance measure tested against radial lag bins, per unit volume.
struct CovarianceEstimate {
  double t = 0.0;
  std::vector<double> edges;     // bin k is [edges[k], edges[k+1]) in |x - y|
  std::vector<double> value;     // c_hat per bin
  std::vector<double> stderr_;   // jackknife standard errors
  double intensity = 0.0;        // mean count / V
  double volume = 0.0;           // V
  std::size_t n_replicates = 0;
};

/// For every bin phi_k = 1{edges[k] <= |r| < edges[k+1]}:
///   c_k = mean_r(sum_{i != j} phi_k(x_i - x_j)) / V - n^2 int phi_k,
/// with n = mean count / V and minimal-image lags on the torus.
CovarianceEstimate covariance_measure(const std::vector<sim::Trace>& traces, double t,
                                      const SpatialDomain& domain, std::vector<double> edges);

/// The same centered pair statistic for an arbitrary even lag function
/// phi with known integral.
PairTerm covariance_term(const std::vector<sim::Trace>& traces, double t,
                         const SpatialDomain& domain, const std::function<double(const Point&)>& phi,
                         double phi_integral, double reach);

/// Residual of the mean equation in intensity form,
///   dn/dt - [n (gamma - mu - alpha n) - alpha U(0) n - alpha int C_t(dr) U(r)],
/// with dn/dt a central difference over [t - dt, t + dt].
struct MomentResidual {
  double t = 0.0;
  double intensity = 0.0;
  double derivative = 0.0;
  double covariance_u = 0.0;  // int C_t(dr) U(r)
  double rhs = 0.0;
  double residual = 0.0;
  Interval ci;                // bootstrap percentile interval
  std::size_t n_replicates = 0;
};

/// Needs a torus, constant rates, counts at t - dt, t, t + dt and positions
/// at t. Bootstrap over replicates with `resamples` resamples.
MomentResidual moment_residual(const std::vector<sim::Trace>& traces, double t, double dt,
                               const ModelParams& params, std::size_t resamples = 1000,
                               double level = 0.99, std::uint64_t seed = 1);

/// Replicate-averaged count per bin divided by the bin length (d = 1).
struct Histogram {
  std::vector<double> edges;
  std::vector<double> intensity;
  std::vector<double> stderr_;
  std::size_t n_replicates = 0;
};

Histogram density_histogram(const std::vector<sim::Trace>& traces, double t,
                            std::vector<double> edges);

/// sum_i sum_j 1{|x_i| <= r} U(x_i, x_j), self pairs included.
double interaction_load(const Population& pop, const ModelParams& params, double r);

}  // namespace bpdl::stats
