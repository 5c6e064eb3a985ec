#include "bpdl/population.hpp"

namespace bpdl {

Population Population::repeated(int dim, const Point& x, std::size_t n) {
  return Population(dim, std::vector<Point>(n, x));
}

std::vector<double> Population::flatten() const {
  std::vector<double> out;
  out.reserve(positions_.size() * static_cast<std::size_t>(dim_));
  for (const Point& p : positions_) {
    for (int a = 0; a < dim_; ++a) out.push_back(p[a]);
  }
  return out;
}

Population Population::unflatten(int dim, std::span<const double> coords) {
  Population pop(dim);
  const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < n; ++i) {
    Point p{};
    for (int a = 0; a < dim; ++a) p[a] = coords[i * static_cast<std::size_t>(dim) + a];
    pop.add(p);
  }
  return pop;
}

}  // namespace bpdl
