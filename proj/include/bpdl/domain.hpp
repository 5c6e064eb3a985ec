#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "bpdl/rng.hpp"

namespace bpdl {

inline constexpr int kMaxDim = 3;

/// A position in R^d (or Z^d for lattice mode). Unused trailing
/// coordinates stay at zero.
using Point = std::array<double, kMaxDim>;

enum class DomainMode { unbounded, torus, box, lattice };

std::string to_string(DomainMode mode);
DomainMode domain_mode_from_string(const std::string& name);

/// The state space: unbounded R^d, a periodic torus, a box whose outside
/// absorbs seeds, or the integer lattice Z^d.
class SpatialDomain {
 public:
  static SpatialDomain unbounded(int dim);
  static SpatialDomain torus(int dim, double side);
  static SpatialDomain box(int dim, double lo, double hi);
  static SpatialDomain box(int dim, const Point& lo, const Point& hi);
  static SpatialDomain lattice(int dim);

  DomainMode mode() const { return mode_; }
  int dim() const { return dim_; }
  bool bounded() const { return mode_ == DomainMode::torus || mode_ == DomainMode::box; }
  bool periodic() const { return mode_ == DomainMode::torus; }

  const Point& lower() const { return lo_; }
  const Point& upper() const { return hi_; }
  double side(int axis) const { return hi_[axis] - lo_[axis]; }

  /// Lebesgue volume of a bounded domain; infinity otherwise.
  double volume() const;

  /// Maps a landing point into the domain: wrapped on the torus, nullopt
  /// ("lost") outside a box, unchanged otherwise.
  std::optional<Point> place(const Point& p) const;

  /// to - from, using the minimal image on the torus.
  Point displacement(const Point& from, const Point& to) const;

  double distance(const Point& a, const Point& b) const;

  bool contains(const Point& p) const;

  /// Uniform point in a bounded domain.
  Point sample_uniform(Rng& rng) const;

 private:
  SpatialDomain(DomainMode mode, int dim, const Point& lo, const Point& hi);

  DomainMode mode_;
  int dim_;
  Point lo_{};
  Point hi_{};
};

inline double norm(const Point& z, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += z[a] * z[a];
  return std::sqrt(s);
}

}  // namespace bpdl
