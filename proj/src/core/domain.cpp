#include "bpdl/domain.hpp"

#include <limits>

#include "bpdl/errors.hpp"

namespace bpdl {

std::string to_string(DomainMode mode) {
  switch (mode) {
    case DomainMode::unbounded: return "unbounded";
    case DomainMode::torus: return "torus";
    case DomainMode::box: return "box";
    case DomainMode::lattice: return "lattice";
  }
  return "unknown";
}

DomainMode domain_mode_from_string(const std::string& name) {
  if (name == "unbounded") return DomainMode::unbounded;
  if (name == "torus") return DomainMode::torus;
  if (name == "box") return DomainMode::box;
  if (name == "lattice") return DomainMode::lattice;
  throw BadConfig("unknown domain mode '" + name + "'");
}

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw BadConfig("dimension must be in 1.." + std::to_string(kMaxDim));
  }
}

}  // namespace

SpatialDomain::SpatialDomain(DomainMode mode, int dim, const Point& lo, const Point& hi)
    : mode_(mode), dim_(dim), lo_(lo), hi_(hi) {}

SpatialDomain SpatialDomain::unbounded(int dim) {
  check_dim(dim);
  return SpatialDomain(DomainMode::unbounded, dim, Point{}, Point{});
}

SpatialDomain SpatialDomain::torus(int dim, double side) {
  check_dim(dim);
  if (!(side > 0.0)) throw BadConfig("torus side must be positive");
  Point lo{}, hi{};
  for (int a = 0; a < dim; ++a) {
    lo[a] = -0.5 * side;
    hi[a] = 0.5 * side;
  }
  return SpatialDomain(DomainMode::torus, dim, lo, hi);
}

SpatialDomain SpatialDomain::box(int dim, double lo, double hi) {
  Point l{}, h{};
  for (int a = 0; a < dim; ++a) {
    l[a] = lo;
    h[a] = hi;
  }
  return box(dim, l, h);
}

SpatialDomain SpatialDomain::box(int dim, const Point& lo, const Point& hi) {
  check_dim(dim);
  for (int a = 0; a < dim; ++a) {
    if (!(lo[a] < hi[a])) throw BadConfig("box bounds must be ordered");
  }
  return SpatialDomain(DomainMode::box, dim, lo, hi);
}

SpatialDomain SpatialDomain::lattice(int dim) {
  check_dim(dim);
  return SpatialDomain(DomainMode::lattice, dim, Point{}, Point{});
}

double SpatialDomain::volume() const {
  if (!bounded()) return std::numeric_limits<double>::infinity();
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= side(a);
  return v;
}

std::optional<Point> SpatialDomain::place(const Point& p) const {
  switch (mode_) {
    case DomainMode::torus: {
      Point q = p;
      for (int a = 0; a < dim_; ++a) {
        const double len = side(a);
        double r = std::fmod(q[a] - lo_[a], len);
        if (r < 0.0) r += len;
        // fmod can return len itself after the shift for tiny negatives
        if (r >= len) r -= len;
        q[a] = lo_[a] + r;
      }
      return q;
    }
    case DomainMode::box:
      if (!contains(p)) return std::nullopt;
      return p;
    default:
      return p;
  }
}

Point SpatialDomain::displacement(const Point& from, const Point& to) const {
  Point d{};
  for (int a = 0; a < dim_; ++a) {
    double v = to[a] - from[a];
    if (mode_ == DomainMode::torus) {
      const double len = side(a);
      if (v > 0.5 * len) {
        v -= len;
      } else if (v < -0.5 * len) {
        v += len;
      }
    }
    d[a] = v;
  }
  return d;
}

double SpatialDomain::distance(const Point& a, const Point& b) const {
  return norm(displacement(a, b), dim_);
}

bool SpatialDomain::contains(const Point& p) const {
  if (!bounded()) return true;
  for (int a = 0; a < dim_; ++a) {
    if (p[a] < lo_[a] || p[a] > hi_[a]) return false;
  }
  return true;
}

Point SpatialDomain::sample_uniform(Rng& rng) const {
  if (!bounded()) throw BadConfig("cannot sample uniformly from an unbounded domain");
  Point p{};
  for (int a = 0; a < dim_; ++a) p[a] = rng.uniform(lo_[a], hi_[a]);
  if (mode_ == DomainMode::torus) return *place(p);
  return p;
}

}  // namespace bpdl
