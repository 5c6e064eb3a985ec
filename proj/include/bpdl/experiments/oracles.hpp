#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bpdl::experiments {

/// Continuous-time birth-death chain on {0, ..., n_max} with birth rate
/// birth(n) and death rate death(n) (no births from n_max), absorbed at 0.
/// Exact reference for population counts that dominate or equal the
/// simulated ones.
class BirthDeathChain {
 public:
  BirthDeathChain(std::function<double(std::size_t)> birth,
                  std::function<double(std::size_t)> death, std::size_t n_max);

  /// Linear chain: birth lambda n, death mu n.
  static BirthDeathChain linear(double lambda, double mu, std::size_t n_max);
  /// Logistic chain: birth lambda n, death mu n + kappa n^2.
  static BirthDeathChain logistic(double lambda, double mu, double kappa, std::size_t n_max);

  std::size_t n_max() const { return n_max_; }

  /// E_n0[extinction time] (tridiagonal solve).
  double mean_extinction_time(std::size_t n0) const;
  /// E_n0[N_t] and P_n0(N_t = 0) from the forward equations (uniformization).
  std::vector<double> distribution(std::size_t n0, double t) const;
  double extinction_cdf(std::size_t n0, double t) const;
  /// Smallest t with P_n0(T_ext <= t) >= p, to relative precision 1e-6.
  double extinction_quantile(std::size_t n0, double p) const;

 private:
  void propagate(std::vector<double>& p, double t) const;

  std::vector<double> b_, d_;
  std::size_t n_max_;
  double lambda_max_ = 0.0;
};

/// P(extinct by t) for a single ancestor of the linear birth-death process
/// with birth lambda and death mu (closed form).
double linear_extinction_probability(double lambda, double mu, double t);

}  // namespace bpdl::experiments
