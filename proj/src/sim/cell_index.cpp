#include "bpdl/sim/cell_index.hpp"

#include <algorithm>
#include <cmath>

namespace bpdl::sim {

namespace {
constexpr std::int64_t kMaxFlatCells = std::int64_t{1} << 22;
constexpr std::int64_t kPackOffset = std::int64_t{1} << 20;
}  // namespace

CellIndex::CellIndex(const SpatialDomain& domain, double radius) : dim_(domain.dim()) {
  if (!std::isfinite(radius)) {
    single_ = true;
    return;
  }
  single_ = false;
  periodic_ = domain.periodic();
  reach_ = radius > 0.0 ? 1 : 0;
  const double h = radius > 0.0 ? radius : 1.0;
  if (domain.bounded()) {
    std::int64_t total = 1;
    for (int a = 0; a < dim_; ++a) {
      const double len = domain.side(a);
      n_[a] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(len / h)));
      side_[a] = len / static_cast<double>(n_[a]);
      origin_[a] = domain.lower()[a];
      total = total > kMaxFlatCells ? total : total * n_[a];
    }
    if (total <= kMaxFlatCells) {
      flat_ = true;
      cells_.resize(static_cast<std::size_t>(total));
    }
  } else {
    for (int a = 0; a < dim_; ++a) side_[a] = h;
    if (domain.mode() == DomainMode::lattice) {
      // integer sites sit at cell centres, away from rounding at edges
      for (int a = 0; a < dim_; ++a) origin_[a] = -0.5 * h;
    }
  }
}

void CellIndex::coords(const Point& x, std::array<std::int64_t, kMaxDim>& c) const {
  for (int a = 0; a < dim_; ++a) {
    std::int64_t k = static_cast<std::int64_t>(std::floor((x[a] - origin_[a]) / side_[a]));
    if (n_[a] > 0) k = std::clamp<std::int64_t>(k, 0, n_[a] - 1);
    c[a] = k;
  }
}

int CellIndex::axis_offsets(int axis, std::int64_t base, std::array<std::int64_t, 3>& out) const {
  int m = 0;
  for (std::int64_t off = -reach_; off <= reach_; ++off) {
    std::int64_t k = base + off;
    const std::int64_t n = n_[axis];
    if (n > 0) {
      if (periodic_) {
        k = ((k % n) + n) % n;
      } else if (k < 0 || k >= n) {
        continue;
      }
    }
    bool seen = false;
    for (int i = 0; i < m; ++i) seen = seen || out[i] == k;
    if (!seen) out[m++] = k;
  }
  return m;
}

std::uint64_t CellIndex::pack(const std::array<std::int64_t, kMaxDim>& c) {
  std::uint64_t key = 0;
  for (int a = 0; a < kMaxDim; ++a) {
    key = (key << 21) | static_cast<std::uint64_t>((c[a] + kPackOffset) & ((1 << 21) - 1));
  }
  return key;
}

std::int64_t CellIndex::lookup(const std::array<std::int64_t, kMaxDim>& c) const {
  if (flat_) {
    std::int64_t slot = 0;
    for (int a = dim_ - 1; a >= 0; --a) slot = slot * n_[a] + c[a];
    return slot;
  }
  auto it = hashed_.find(pack(c));
  return it == hashed_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::uint32_t CellIndex::slot_for(const std::array<std::int64_t, kMaxDim>& c) {
  if (single_) {
    if (cells_.empty()) cells_.emplace_back();
    return 0;
  }
  if (flat_) return static_cast<std::uint32_t>(lookup(c));
  auto [it, fresh] = hashed_.try_emplace(pack(c), static_cast<std::uint32_t>(cells_.size()));
  if (fresh) cells_.emplace_back();
  return it->second;
}

void CellIndex::insert(std::uint32_t id, const Point& x) {
  std::array<std::int64_t, kMaxDim> c{};
  if (!single_) coords(x, c);
  const std::uint32_t slot = slot_for(c);
  if (id >= cell_of_.size()) {
    cell_of_.resize(id + 1);
    pos_of_.resize(id + 1);
  }
  cell_of_[id] = slot;
  pos_of_[id] = static_cast<std::uint32_t>(cells_[slot].size());
  cells_[slot].push_back(id);
  ++count_;
}

void CellIndex::erase(std::uint32_t id) {
  auto& cell = cells_[cell_of_[id]];
  const std::uint32_t pos = pos_of_[id];
  const std::uint32_t moved = cell.back();
  cell[pos] = moved;
  pos_of_[moved] = pos;
  cell.pop_back();
  --count_;
}

void CellIndex::relabel(std::uint32_t from, std::uint32_t to) {
  if (from == to) return;
  if (to >= cell_of_.size()) {
    cell_of_.resize(to + 1);
    pos_of_.resize(to + 1);
  }
  cell_of_[to] = cell_of_[from];
  pos_of_[to] = pos_of_[from];
  cells_[cell_of_[to]][pos_of_[to]] = to;
}

void CellIndex::clear() {
  for (auto& cell : cells_) cell.clear();
  if (!flat_) {
    cells_.clear();
    hashed_.clear();
  }
  cell_of_.clear();
  pos_of_.clear();
  count_ = 0;
}

}  // namespace bpdl::sim
