#pragma once

#include <cstddef>
#include <vector>

namespace bpdl::sim {

/// Complete binary tree of partial sums over a growable array of
/// nonnegative weights. Each internal node is recomputed from its children
/// on update, so totals never accumulate drift.
class SumTree {
 public:
  std::size_t size() const { return size_; }
  double total() const { return size_ == 0 ? 0.0 : nodes_[1]; }
  double get(std::size_t i) const { return nodes_[capacity_ + i]; }

  void push_back(double w);
  void pop_back();
  void set(std::size_t i, double w);
  void clear();

  /// Index i with prefix(i) <= target < prefix(i + 1), for target in
  /// [0, total()).
  std::size_t find(double target) const;

 private:
  void grow();

  std::size_t size_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> nodes_;  // 1-based heap layout, leaves at [capacity_, 2 capacity_)
};

}  // namespace bpdl::sim
