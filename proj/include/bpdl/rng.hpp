#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bpdl {

/// Seedable random stream. Every replicate owns one, derived from
/// (master seed, stream id) so results do not depend on thread scheduling.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 1);

  /// Independent stream for replicate `stream_id` under `master_seed`.
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id);

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential variate by inverse CDF on the open unit interval.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() { return normal_(engine_); }

  std::uint64_t poisson(double mean);

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to decorrelate seed material.
std::uint64_t mix64(std::uint64_t x);

}  // namespace bpdl
