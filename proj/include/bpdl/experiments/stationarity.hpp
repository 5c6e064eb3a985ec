#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bpdl/domain.hpp"
#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/stats/hypothesis.hpp"
#include "bpdl/test_function.hpp"

namespace bpdl::experiments {

/// phi(nu) = F(<nu, f>) with F bounded and f compactly supported. F may
/// have kinks (listed so quadrature can split there); f is assumed monotone
/// between its breakpoints.
struct Functional {
  std::string name;
  std::function<double(double)> F;
  TestFunction f;
  std::vector<double> kinks;

  double operator()(const Population& pop) const;

  static Functional identity(const TestFunction& f);
  static Functional clipped(const TestFunction& f, double cap);  // min(u, cap)
  static Functional saturating(const TestFunction& f);           // u / (1 + u)
  static Functional arctan(const TestFunction& f);
};

/// F in {min(u, 10), u / (1 + u), arctan} times f in {1[-1, 1], triangle(0, 1)}.
std::vector<Functional> default_battery();

/// L phi(nu) for phi = F(<nu, f>):
///   sum_i gamma(x_i) int D(z) [F(u + f(x_i + z)) - F(u)] dz
/// + sum_i (mu(x_i) + alpha(x_i) S_i) [F(u - f(x_i)) - F(u)],
/// with u = <nu, f> and S_i = sum_j U(x_i, x_j). The dispersal integrals use
/// adaptive Gauss-Kronrod quadrature (absolute tolerance 1e-8; d = 1 for
/// continuous kernels) and throw QuadratureFail when it is not reached.
double eval_generator(const Functional& phi, const Population& pop, const ModelParams& params);

/// Poisson field of intensity c0 = gamma / alpha under detailed balance
/// (mu = 0, D = U, U(0) = 0, constant rates, d = 1). The field is sampled on
/// the inner window padded by the kernel support radius, which leaves every
/// generator term that touches [-inner, inner] exact.
struct StationarityPlan {
  double gamma = 2.0;
  double mu = 0.0;
  double alpha = 0.5;
  Kernel kernel = Kernel::annulus(1, 0.25, 0.75);  // D = U
  /// Poisson intensity; 0 means c0 = gamma / alpha.
  double intensity = 0.0;
  double inner_half_width = 1.0;
  std::vector<Functional> battery = default_battery();
  std::size_t replicates = 10000;
  /// Reject plans that break detailed balance (off for control runs).
  bool enforce_dbc = true;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct StationarityRow {
  std::string name;
  double mean = 0.0;
  double stderr_ = 0.0;
  stats::Interval ci;  // mean +- 3 SE
  bool contains_zero = false;
};

struct StationarityReport {
  double intensity = 0.0;
  bool dbc_holds = false;
  SpatialDomain window = SpatialDomain::box(1, -1.0, 1.0);
  std::vector<StationarityRow> rows;
  bool all_contain_zero = false;
  bool none_contain_zero = false;
};

/// Parameters of the plan on an unbounded line.
ModelParams stationarity_params(const StationarityPlan& plan);
StationarityReport stationarity_test(const StationarityPlan& plan);

/// Catalog of h(x, nu) for the Palm identity
///   E sum_i h(x_i, nu) = int m(dx) E h(x, nu + delta_x).
enum class PalmFunction { indicator, count_weighted, zero };  // 1_B, 1_B nu(B), 0

std::string to_string(PalmFunction h);

struct SlivnyakPlan {
  SpatialDomain window = SpatialDomain::box(1, -2.0, 2.0);
  double intensity = 2.0;
  /// B, a box inside the window.
  SpatialDomain set = SpatialDomain::box(1, -0.5, 0.5);
  std::vector<PalmFunction> catalog{PalmFunction::indicator, PalmFunction::count_weighted,
                                    PalmFunction::zero};
  std::size_t replicates = 20000;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct SlivnyakRow {
  PalmFunction h = PalmFunction::zero;
  stats::Summary lhs;
  stats::Summary rhs;
  double exact = 0.0;  // closed form with lambda = m(B)
  bool intervals_overlap = false;
  bool exact_in_lhs = false;
};

struct SlivnyakReport {
  double lambda = 0.0;  // m(B)
  std::vector<SlivnyakRow> rows;
  bool all_agree = false;
};

/// Monte Carlo of both sides. The left side sums h over a Poisson sample;
/// the right side draws x uniformly on the window and reports
/// m(W) h(x, nu + delta_x) from an independent sample.
SlivnyakReport slivnyak_check(const SlivnyakPlan& plan);

}  // namespace bpdl::experiments
