#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/sim/simulator.hpp"
#include "bpdl/stats/estimators.hpp"
#include "bpdl/stats/hypothesis.hpp"
#include "bpdl/stats/martingale.hpp"
#include "bpdl/test_function.hpp"

namespace bpdl::experiments {

/// The reference preset (gamma = 5, mu = 1, alpha = 1, U = 1{|x - y| <= 1/2},
/// D uniform on [-3, 3]) on a torus of the given side centred at 0.
ModelParams reference_params(double torus_side = 40.0);

/// Settings shared by the reference runs. Runs start from
/// `initial_count` individuals at the origin.
struct ReferenceSetup {
  double torus_side = 40.0;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  sim::SimOptions options{.engine = sim::EngineKind::indexed};
};

/// Empirical density at fixed times, averaged over the replicates still
/// alive at the last time. Acceptance reads the bins inside
/// [-judge_half_width, judge_half_width] at `judge_time`.
struct DensityPlan {
  ReferenceSetup setup{.replicates = 200};
  std::size_t initial_count = 1;
  std::vector<double> times{3.0, 25.0};
  double judge_time = 25.0;
  double bin_width = 1.0;
  double plot_half_width = 20.0;
  double judge_half_width = 5.0;
  double tolerance = 0.15;
};

struct DensityReport {
  double c0 = 0.0;
  std::size_t replicates = 0;
  std::size_t survivors = 0;
  std::vector<double> times;
  std::vector<stats::Histogram> histograms;  // one per time, survivors only
  /// Judged bins: worst relative deviation from c0 and the pooled intensity.
  double max_relative_deviation = 0.0;
  double pooled_intensity = 0.0;
  double pooled_stderr = 0.0;
  bool pass = false;
};

DensityReport density_run(const DensityPlan& plan);

/// nu_t(window) over time and its time average over [t_from, t_to],
/// integrated exactly along each surviving path.
struct CountPlan {
  ReferenceSetup setup{.replicates = 200};
  std::vector<std::size_t> initial_counts{1, 60};
  double window_half_width = 5.0;
  double horizon = 25.0;
  double t_from = 15.0;
  double t_to = 25.0;
  double series_dt = 0.25;
  double tolerance = 0.15;
};

struct CountSeries {
  std::size_t initial_count = 0;
  std::size_t survivors = 0;
  std::vector<double> times;
  std::vector<double> mean;  // over survivors
  std::vector<double> stderr_;
  stats::Summary time_average;
  double relative_deviation = 0.0;
  bool pass = false;
};

struct CountReport {
  double target = 0.0;  // c0 times the window length
  std::vector<CountSeries> series;
  bool pass = false;
};

CountReport count_run(const CountPlan& plan);

/// sum_i sum_j 1{|x_i| <= r} U(x_i, x_j) over time, from one individual at
/// the origin, with its time average over [t_from, t_to].
struct LoadPlan {
  ReferenceSetup setup{.replicates = 200};
  double radius = 5.0;
  double horizon = 25.0;
  double t_from = 15.0;
  double t_to = 25.0;
  double series_dt = 0.25;
  double tolerance = 0.20;
};

struct LoadReport {
  double target = 0.0;  // 2 r c0^2
  std::size_t survivors = 0;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_;
  stats::Summary time_average;
  double relative_deviation = 0.0;
  bool pass = false;
};

LoadReport load_run(const LoadPlan& plan);

/// A named model and initial condition for the engine comparison.
struct EnginePreset {
  std::string name;
  ModelParams params;
  Population initial;
};

/// Three presets: the reference model from one individual, Gaussian kernels
/// on a smaller torus, and an absorbing box with non-constant birth.
std::vector<EnginePreset> engine_presets();

struct EnginePlan {
  std::vector<EnginePreset> presets = engine_presets();
  double horizon = 10.0;
  std::size_t replicates = 500;
  double p_min = 0.01;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct EngineRow {
  std::string name;
  double faithful_mean = 0.0;
  double indexed_mean = 0.0;
  stats::TestResult ks;
  bool pass = false;
};

struct EngineReport {
  std::vector<EngineRow> rows;
  bool pass = false;
};

/// Two-sample Kolmogorov-Smirnov test on the final count, faithful engine
/// against indexed engine, with independent seeds.
EngineReport engine_equivalence(const EnginePlan& plan);

struct MartingalePlan {
  ReferenceSetup setup{.replicates = 10000};
  double horizon = 2.0;
  std::vector<TestFunction> functions{TestFunction::constant(1.0),
                                      TestFunction::indicator(-1.0, 1.0)};
  double ratio_lo = 0.8;
  double ratio_hi = 1.2;
};

struct MartingaleRow {
  std::string name;
  stats::MartingaleSummary summary;
  bool mean_ok = false;   // |mean| <= 3 SE
  bool ratio_ok = false;  // ratio in [ratio_lo, ratio_hi]
};

struct MartingaleReport {
  std::vector<MartingaleRow> rows;
  bool pass = false;
};

MartingaleReport martingale_suite(const MartingalePlan& plan);

struct MomentPlan {
  ReferenceSetup setup{.replicates = 10000};
  std::vector<double> times{1.0, 5.0, 25.0};
  double dt = 0.01;
  std::size_t resamples = 1000;
  double level = 0.99;
};

struct MomentReport {
  std::vector<stats::MomentResidual> rows;
  bool pass = false;  // every interval contains 0
};

/// Residual of the mean equation over all replicates (extinct ones
/// included: the equation is for the unconditional mean).
MomentReport moment_suite(const MomentPlan& plan);

}  // namespace bpdl::experiments
