#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/sim/simulator.hpp"

namespace bpdl::experiments {

/// Number of cubes of diagonal delta needed to cover a torus:
/// prod over axes of ceil(L_a / (delta / sqrt(d))).
std::size_t cube_count(const SpatialDomain& torus, double delta);

/// Lower bound U(x, y) >= epsilon 1{|x - y| <= delta} read off the
/// competition kernel (tophat: its height and radius; Gaussian: the value at
/// one standard deviation). Throws BadConfig for kernels with U(0) = 0.
struct CompetitionFloor {
  double epsilon = 0.0;
  double delta = 0.0;
};
CompetitionFloor competition_floor(const Kernel& u);

/// Greatest solution of rate x0 = alpha0 x0 phi(x0) with phi(n) = epsilon n / Lc:
/// x0 = ||gamma - mu||_inf Lc / (alpha0 epsilon).
double mass_bound_x0(double rate_gap, double alpha0, double epsilon, std::size_t cubes);

struct ExtinctionPlan {
  ModelParams params;
  Population initial;
  std::size_t replicates = 200;
  /// Explicit time cap; empty means 10 x the 99th percentile of the
  /// extinction time of the dominating birth-death chain.
  std::optional<double> cap;
  /// Spacing of the mean-mass grid.
  double mass_dt = 0.5;
  /// Competition floor override; empty reads it from the kernel.
  std::optional<CompetitionFloor> floor;
  std::uint64_t seed = 1;
  int threads = 0;
  sim::SimOptions options;
};

struct ExtinctionReport {
  std::size_t replicates = 0;
  std::size_t extinct = 0;
  double extinct_fraction = 0.0;
  /// Over extinct replicates.
  double mean_time = 0.0;
  double time_stderr = 0.0;
  double median_time = 0.0;
  double q90_time = 0.0;
  double max_time = 0.0;
  double cap = 0.0;
  bool cap_from_oracle = false;
  /// Dominating chain: birth gamma_bar n, death mu_min n + kappa n^2.
  double chain_kappa = 0.0;
  double oracle_mean_time = 0.0;
  double oracle_q99_time = 0.0;
  bool mean_time_within_oracle = false;  // mean <= oracle mean + 3 SE
  /// Torus runs only (compact mode); cubes = 0 and NaN bounds elsewhere.
  std::size_t cubes = 0;
  double x0 = 0.0;
  double mass_bound = 0.0;  // max(<nu_0, 1>, x0)
  std::vector<double> mass_times;
  std::vector<double> mean_mass;
  std::vector<double> mean_mass_stderr;
  double sup_mean_mass = 0.0;
  bool mass_bound_ok = true;  // sup_t mean - bound <= 3 SE at every t
};

/// Runs replicates until extinction or the cap and summarizes extinction
/// times and the running mean mass against the compact-mode bound.
ExtinctionReport extinction_experiment(const ExtinctionPlan& plan);

/// gamma 2^-d / (mu + alpha) > 2.
bool lattice_survival_condition(double gamma, double mu, double alpha, int dim);

/// Lattice BPDL on Z^d (U = 1{x = y}, D uniform on nearest neighbours) and
/// the contact process with lambda_d = gamma 2^-d per empty neighbour and
/// lambda_m = mu + alpha, both started from one individual at the origin.
/// A run counts as surviving when it is alive at T; a run that occupies
/// `established_sites` distinct sites is stopped early and counted alive.
struct LatticePlan {
  int dim = 1;
  double gamma = 13.0;
  double mu = 1.0;
  double alpha = 2.0;
  double horizon = 200.0;
  std::size_t replicates = 400;
  std::size_t established_sites = 64;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct LatticeReport {
  bool condition_holds = false;
  std::size_t replicates = 0;
  double bpdl_survival = 0.0;
  double bpdl_stderr = 0.0;
  std::size_t bpdl_established = 0;
  double contact_survival = 0.0;
  double contact_stderr = 0.0;
  std::size_t contact_established = 0;
  bool dominates = false;  // bpdl >= contact - 3 SE of the difference
  bool positive = false;
};

ModelParams lattice_params(const LatticePlan& plan);

struct ContactRun {
  bool alive = false;
  bool established = false;
  double final_time = 0.0;
  std::size_t occupied = 0;
};

/// One contact-process run from the origin.
ContactRun run_contact_process(int dim, double lambda_d, double lambda_m, double horizon,
                               std::size_t established_sites, Rng& rng);

LatticeReport lattice_survival(const LatticePlan& plan);

}  // namespace bpdl::experiments
