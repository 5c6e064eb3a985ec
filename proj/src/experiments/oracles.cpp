#include "bpdl/experiments/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "bpdl/errors.hpp"

namespace bpdl::experiments {

BirthDeathChain::BirthDeathChain(std::function<double(std::size_t)> birth,
                                 std::function<double(std::size_t)> death, std::size_t n_max)
    : b_(n_max + 1), d_(n_max + 1), n_max_(n_max) {
  if (n_max < 1) throw BadConfig("birth-death chain needs n_max >= 1");
  for (std::size_t n = 0; n <= n_max; ++n) {
    b_[n] = n == 0 || n == n_max ? 0.0 : birth(n);
    d_[n] = n == 0 ? 0.0 : death(n);
    if (b_[n] < 0.0 || d_[n] < 0.0) throw NegativeRate("birth-death chain rates must be >= 0");
    if (n > 0 && !(d_[n] > 0.0)) throw BadConfig("birth-death chain needs positive death rates");
    lambda_max_ = std::max(lambda_max_, b_[n] + d_[n]);
  }
}

BirthDeathChain BirthDeathChain::linear(double lambda, double mu, std::size_t n_max) {
  return BirthDeathChain([=](std::size_t n) { return lambda * static_cast<double>(n); },
                         [=](std::size_t n) { return mu * static_cast<double>(n); }, n_max);
}

BirthDeathChain BirthDeathChain::logistic(double lambda, double mu, double kappa,
                                          std::size_t n_max) {
  return BirthDeathChain(
      [=](std::size_t n) { return lambda * static_cast<double>(n); },
      [=](std::size_t n) {
        const double x = static_cast<double>(n);
        return mu * x + kappa * x * x;
      },
      n_max);
}

double BirthDeathChain::mean_extinction_time(std::size_t n0) const {
  if (n0 > n_max_) throw BadConfig("initial state above the truncation level");
  // tau_n = E_n - E_{n-1} solves d_n tau_n = 1 + b_n tau_{n+1}
  std::vector<double> tau(n_max_ + 2, 0.0);
  for (std::size_t n = n_max_; n >= 1; --n) tau[n] = (1.0 + b_[n] * tau[n + 1]) / d_[n];
  double e = 0.0;
  for (std::size_t k = 1; k <= n0; ++k) e += tau[k];
  return e;
}

void BirthDeathChain::propagate(std::vector<double>& p, double t) const {
  if (!(t > 0.0) || !(lambda_max_ > 0.0)) return;
  const double L = lambda_max_;
  const auto chunks = static_cast<std::size_t>(std::ceil(L * t / 30.0));
  const double h = t / static_cast<double>(chunks);
  std::vector<double> term(p.size()), next(p.size()), acc(p.size());
  for (std::size_t c = 0; c < chunks; ++c) {
    // p <- sum_k Pois(k; L h) P^k p with P = I + Q / L
    const double lh = L * h;
    double w = std::exp(-lh), cum = w;
    term = p;
    for (std::size_t n = 0; n < p.size(); ++n) acc[n] = w * term[n];
    for (std::size_t k = 1; cum < 1.0 - 1e-16 && k < 100000; ++k) {
      for (std::size_t n = 0; n <= n_max_; ++n) {
        double v = term[n] * (1.0 - (b_[n] + d_[n]) / L);
        if (n > 0) v += term[n - 1] * b_[n - 1] / L;
        if (n < n_max_) v += term[n + 1] * d_[n + 1] / L;
        next[n] = v;
      }
      term.swap(next);
      w *= lh / static_cast<double>(k);
      cum += w;
      for (std::size_t n = 0; n <= n_max_; ++n) acc[n] += w * term[n];
    }
    p = acc;
  }
}

std::vector<double> BirthDeathChain::distribution(std::size_t n0, double t) const {
  if (n0 > n_max_) throw BadConfig("initial state above the truncation level");
  std::vector<double> p(n_max_ + 1, 0.0);
  p[n0] = 1.0;
  propagate(p, t);
  return p;
}

double BirthDeathChain::extinction_cdf(std::size_t n0, double t) const {
  return distribution(n0, t)[0];
}

double BirthDeathChain::extinction_quantile(std::size_t n0, double q) const {
  if (!(q > 0.0 && q < 1.0)) throw BadConfig("quantile level must lie in (0, 1)");
  if (n0 == 0) return 0.0;
  const double step = std::max(1e-6, mean_extinction_time(n0) / 20.0);
  std::vector<double> p(n_max_ + 1, 0.0);
  p[n0] = 1.0;
  double t = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    std::vector<double> nxt = p;
    propagate(nxt, step);
    if (nxt[0] >= q) {
      // bisect inside [t, t + step] starting from p(t)
      double lo = 0.0, hi = step;
      while (hi - lo > 1e-7 * (t + hi)) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> m = p;
        propagate(m, mid);
        (m[0] >= q ? hi : lo) = mid;
      }
      return t + hi;
    }
    p.swap(nxt);
    t += step;
  }
  throw NoConvergence("extinction quantile not reached");
}

double linear_extinction_probability(double lambda, double mu, double t) {
  if (lambda == mu) return lambda * t / (1.0 + lambda * t);
  const double e = std::exp((lambda - mu) * t);
  return mu * (e - 1.0) / (lambda * e - mu);
}

}  // namespace bpdl::experiments
