#include "bpdl/sim/sum_tree.hpp"

namespace bpdl::sim {

void SumTree::grow() {
  const std::size_t new_cap = capacity_ == 0 ? 16 : 2 * capacity_;
  std::vector<double> fresh(2 * new_cap, 0.0);
  for (std::size_t i = 0; i < size_; ++i) fresh[new_cap + i] = nodes_[capacity_ + i];
  for (std::size_t n = new_cap - 1; n >= 1; --n) fresh[n] = fresh[2 * n] + fresh[2 * n + 1];
  nodes_.swap(fresh);
  capacity_ = new_cap;
}

void SumTree::set(std::size_t i, double w) {
  std::size_t n = capacity_ + i;
  nodes_[n] = w;
  for (n >>= 1; n >= 1; n >>= 1) nodes_[n] = nodes_[2 * n] + nodes_[2 * n + 1];
}

void SumTree::push_back(double w) {
  if (size_ == capacity_) grow();
  ++size_;
  set(size_ - 1, w);
}

void SumTree::pop_back() {
  set(size_ - 1, 0.0);
  --size_;
}

void SumTree::clear() {
  size_ = 0;
  capacity_ = 0;
  nodes_.clear();
}

std::size_t SumTree::find(double target) const {
  std::size_t n = 1;
  while (n < capacity_) {
    const double left = nodes_[2 * n];
    if (target < left) {
      n = 2 * n;
    } else {
      target -= left;
      n = 2 * n + 1;
    }
  }
  std::size_t i = n - capacity_;
  // rounding can walk past the last live leaf or onto a zero-weight leaf
  if (i >= size_) i = size_ - 1;
  while (i > 0 && nodes_[capacity_ + i] == 0.0) --i;
  return i;
}

}  // namespace bpdl::sim
