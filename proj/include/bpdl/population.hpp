#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bpdl/domain.hpp"

namespace bpdl {

/// A finite point configuration nu = sum_i delta_{x_i}. Individuals live in
/// insertion order; removal swaps the last individual into the hole, so
/// indices are only stable between events.
class Population {
 public:
  explicit Population(int dim = 1) : dim_(dim) {}
  Population(int dim, std::vector<Point> positions) : dim_(dim), positions_(std::move(positions)) {}

  /// n copies of the same point (e.g. nu_0 = n delta_0).
  static Population repeated(int dim, const Point& x, std::size_t n);

  int dim() const { return dim_; }
  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }

  const Point& operator[](std::size_t i) const { return positions_[i]; }
  std::span<const Point> positions() const { return positions_; }

  std::size_t add(const Point& x) {
    positions_.push_back(x);
    return positions_.size() - 1;
  }

  /// Swap-remove; returns the index that moved into slot i (== size() after
  /// the call when i was the last slot).
  std::size_t remove(std::size_t i) {
    const std::size_t last = positions_.size() - 1;
    positions_[i] = positions_[last];
    positions_.pop_back();
    return last;
  }

  /// Coordinates flattened to size() * dim() doubles.
  std::vector<double> flatten() const;
  static Population unflatten(int dim, std::span<const double> coords);

 private:
  int dim_;
  std::vector<Point> positions_;
};

}  // namespace bpdl
