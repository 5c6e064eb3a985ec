#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bpdl::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test. Ties (integer-valued data) are
/// handled by evaluating both empirical CDFs after each distinct value;
/// the asymptotic p-value is then conservative.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Pearson chi-square goodness of fit; `fitted` parameters are subtracted
/// from the degrees of freedom along with the usual one. Cells with small
/// expected counts should be pooled by the caller.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          int fitted = 0);

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_ = 0.0;
  std::size_t n = 0;
};

Summary summarize(std::span<const double> xs);

/// Percentile bootstrap interval of a statistic over resamples of the
/// index set {0..n-1}; deterministic in `seed`.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

Interval bootstrap_ci(std::size_t n, const std::function<double(std::span<const std::size_t>)>& stat,
                      std::size_t resamples, double level, std::uint64_t seed);

/// Ordinary least squares y = a + b x; returns (a, b, R^2).
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace bpdl::stats
