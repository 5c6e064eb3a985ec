#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpdl/domain.hpp"
#include "bpdl/rng.hpp"

namespace bpdl {

enum class KernelShape { tophat, annulus, gaussian, lattice_nn, lattice_point, tabulated };

std::string to_string(KernelShape shape);
KernelShape kernel_shape_from_string(const std::string& name);

/// A symmetric, radial, translation-invariant kernel K(z) on R^d (or an
/// atomic kernel on Z^d). Used both as the competition weight U(x - y) and
/// as the dispersal density D(z).
///
/// `mass` is the total integral. Probability kernels have mass 1; the
/// competition kernel of the reference simulations has height 1, which in
/// d = 1 with radius 1/2 also gives mass 1.
class Kernel {
 public:
  static Kernel tophat(int dim, double radius, double mass = 1.0);
  static Kernel tophat_height(int dim, double radius, double height);
  static Kernel annulus(int dim, double inner, double outer, double mass = 1.0);
  static Kernel gaussian(int dim, double variance, double mass = 1.0);
  /// Uniform law on the 2d nearest neighbours of the origin in Z^d.
  static Kernel lattice_nn(int dim);
  /// Indicator of z = 0 on Z^d.
  static Kernel lattice_point(int dim);
  /// Radial profile K(r) tabulated at increasing radii (first radius 0),
  /// linear in between, zero beyond the last radius. The mass is the
  /// trapezoid integral of the profile.
  static Kernel tabulated(int dim, std::vector<double> radii, std::vector<double> values);

  KernelShape shape() const { return shape_; }
  int dim() const { return dim_; }
  bool atomic() const {
    return shape_ == KernelShape::lattice_nn || shape_ == KernelShape::lattice_point;
  }

  double operator()(const Point& z) const;
  double at_radius(double r) const;

  double mass() const { return mass_; }
  double sup() const;
  /// Smallest R with K(z) = 0 for |z| > R; infinity for the Gaussian.
  double support_radius() const;

  /// Mass of K restricted to (-inf, x]; d = 1 only.
  double mass_below(double x) const;
  /// Mass of K over [lo, hi]; d = 1 only.
  double mass_between(double lo, double hi) const { return mass_below(hi) - mass_below(lo); }

  /// int_lo^hi z^k K(z) dz for k in {0, 1, 2}; d = 1 only. Empty for
  /// shapes without a closed form (tabulated, atomic).
  std::optional<double> moment_between(int k, double lo, double hi) const;

  /// Radii where the profile is not smooth, for quadrature splitting.
  std::vector<double> radial_breakpoints() const;

  /// Draw z from the normalized law K / mass.
  Point sample(Rng& rng) const;

  /// Integral of the radial profile over R^d by adaptive quadrature.
  double numerical_mass() const;

  // Shape parameters, for serialization.
  double inner() const { return a_; }
  double outer() const { return b_; }
  double variance() const { return var_; }
  double height() const { return height_; }
  const std::vector<double>& table_radii() const { return radii_; }
  const std::vector<double>& table_values() const { return values_; }

  bool same_law_as(const Kernel& other) const;

 private:
  Kernel(KernelShape shape, int dim) : shape_(shape), dim_(dim) {}

  double sample_radius(Rng& rng) const;

  KernelShape shape_;
  int dim_;
  double a_ = 0.0;       // tophat radius / annulus inner radius
  double b_ = 0.0;       // annulus outer radius
  double var_ = 0.0;     // gaussian variance per axis
  double height_ = 0.0;  // value on the support for tophat and annulus
  double mass_ = 1.0;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> shell_cdf_;  // tabulated: cumulative radial mass per segment
};

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int dim);
/// Volume of the unit ball in R^d.
double unit_ball_volume(int dim);

/// Uniform direction on the unit sphere in R^d.
Point random_direction(int dim, Rng& rng);

}  // namespace bpdl
