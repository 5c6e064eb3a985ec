#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bpdl/domain.hpp"

namespace bpdl::sim {

/// Uniform grid of cells with side >= the interaction radius, so every
/// individual within that radius of x lives in x's cell or an adjacent one.
/// Bounded domains use a flat cell array; unbounded ones hash cell
/// coordinates. An infinite radius collapses everything into one cell.
///
/// Ids are dense population indices; the owner keeps them in sync with
/// swap-removal through erase() followed by relabel().
class CellIndex {
 public:
  CellIndex() = default;
  CellIndex(const SpatialDomain& domain, double radius);

  void insert(std::uint32_t id, const Point& x);
  void erase(std::uint32_t id);
  /// The individual stored under `from` is now known as `to` (which must
  /// be free, i.e. erased).
  void relabel(std::uint32_t from, std::uint32_t to);
  void clear();

  std::size_t size() const { return count_; }

  /// Calls fn(id) for every stored id in the cells around x. Each id is
  /// visited once; ids farther than the radius may be visited too.
  template <class Fn>
  void for_each_candidate(const Point& x, Fn&& fn) const {
    if (single_) {
      if (!cells_.empty()) {
        for (std::uint32_t id : cells_[0]) fn(id);
      }
      return;
    }
    std::array<std::int64_t, kMaxDim> base{};
    coords(x, base);
    std::array<std::array<std::int64_t, 3>, kMaxDim> axis{};
    std::array<int, kMaxDim> axis_n{};
    for (int a = 0; a < dim_; ++a) axis_n[a] = axis_offsets(a, base[a], axis[a]);
    std::array<std::int64_t, kMaxDim> c{};
    std::array<int, kMaxDim> k{};
    for (;;) {
      for (int a = 0; a < dim_; ++a) c[a] = axis[a][k[a]];
      const std::int64_t slot = lookup(c);
      if (slot >= 0) {
        for (std::uint32_t id : cells_[static_cast<std::size_t>(slot)]) fn(id);
      }
      int a = 0;
      while (a < dim_ && ++k[a] == axis_n[a]) k[a++] = 0;
      if (a == dim_) break;
    }
  }

 private:
  void coords(const Point& x, std::array<std::int64_t, kMaxDim>& c) const;
  int axis_offsets(int axis, std::int64_t base, std::array<std::int64_t, 3>& out) const;
  std::int64_t lookup(const std::array<std::int64_t, kMaxDim>& c) const;
  std::uint32_t slot_for(const std::array<std::int64_t, kMaxDim>& c);
  static std::uint64_t pack(const std::array<std::int64_t, kMaxDim>& c);

  int dim_ = 1;
  bool single_ = true;
  bool flat_ = false;
  bool periodic_ = false;
  int reach_ = 1;
  Point origin_{};
  std::array<double, kMaxDim> side_{};
  std::array<std::int64_t, kMaxDim> n_{};
  std::vector<std::vector<std::uint32_t>> cells_;
  std::unordered_map<std::uint64_t, std::uint32_t> hashed_;
  std::vector<std::uint32_t> cell_of_;
  std::vector<std::uint32_t> pos_of_;
  std::size_t count_ = 0;
};

}  // namespace bpdl::sim
