#pragma once

#include <vector>

#include "bpdl/meanfield/field.hpp"
#include "bpdl/params.hpp"

namespace bpdl::meanfield {

/// Constant-rate, translation-invariant model on a periodic grid:
///   d xi / dt = gamma (xi * D) - mu xi - alpha xi (xi * U).
struct Model {
  double gamma = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  Grid grid;
  KernelStencil dispersal;
  KernelStencil competition;
  ConvolutionMethod method = ConvolutionMethod::automatic;

  /// (gamma - mu) / alpha.
  double carrying_capacity() const { return (gamma - mu) / alpha; }
};

/// Builds the grid model from validated parameters. The domain must be a
/// torus (d <= 2) and the rates constant; throws BadConfig otherwise.
Model make_model(const ModelParams& params, std::size_t nodes_per_axis,
                 ConvolutionMethod method = ConvolutionMethod::automatic);

/// Direct construction from constant rates and kernels on a given grid.
Model make_model(double gamma, double mu, double alpha, const Kernel& dispersal,
                 const Kernel& competition, const Grid& grid,
                 ConvolutionMethod method = ConvolutionMethod::automatic);

/// gamma (xi * D) - mu xi - alpha xi (xi * U), pointwise.
std::vector<double> rhs(const Model& model, const DensityField& field);

/// Largest recommended step: 0.1 / (gamma + mu + alpha sup(xi) int U).
double stable_dt(const Model& model, const DensityField& field);

struct IntegrateResult {
  DensityField final_field;
  std::vector<double> times;  // every step, starting at 0
  std::vector<double> masses;
  std::vector<double> l2_to_c0;  // only when c0 is defined (gamma > mu, alpha > 0)
  std::vector<DensityField> outputs;  // fields at the requested output times
  double max_clip_fraction = 0.0;
};

/// Classical fourth-order Runge-Kutta up to T with steps of at most dt
/// (shortened so every output time is hit exactly). Negative values are
/// clipped to 0 after each step; clipping more than 1e-12 of the mass in
/// one step, or a step above stable_dt for the current field, throws
/// StepTooLarge.
IntegrateResult integrate(const Model& model, const DensityField& field0, double T, double dt,
                          const std::vector<double>& output_times = {});

struct PicardResult {
  DensityField field;
  /// max over iterates, time nodes and grid points of
  /// xi^n_t(x) / (sup xi_0 e^{gamma t}); at most 1 in exact arithmetic.
  double max_growth_ratio = 0.0;
  /// sup-norm change made by the last sweep of each window.
  std::vector<double> last_sweep_change;
};

/// Implicit Picard scheme: in each window of length `window` the iterate
/// xi^{n+1} solves the scalar linear equation
///   d/dt xi^{n+1} = gamma (xi^n * D) - (mu + alpha (xi^n * U)) xi^{n+1}
/// pointwise with xi^n frozen, integrated by an exponential Simpson rule on
/// `substeps` time nodes per window. n_iters sweeps are made per window.
PicardResult picard_iterate(const Model& model, const DensityField& field0, double T,
                            int n_iters, double window = 0.1, int substeps = 40);

}  // namespace bpdl::meanfield
