#include "bpdl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bpdl/errors.hpp"

namespace bpdl {

std::string to_string(KernelShape shape) {
  switch (shape) {
    case KernelShape::tophat: return "tophat";
    case KernelShape::annulus: return "annulus";
    case KernelShape::gaussian: return "gaussian";
    case KernelShape::lattice_nn: return "lattice_nn";
    case KernelShape::lattice_point: return "lattice_point";
    case KernelShape::tabulated: return "tabulated";
  }
  return "unknown";
}

KernelShape kernel_shape_from_string(const std::string& name) {
  if (name == "tophat") return KernelShape::tophat;
  if (name == "annulus") return KernelShape::annulus;
  if (name == "gaussian") return KernelShape::gaussian;
  if (name == "lattice_nn") return KernelShape::lattice_nn;
  if (name == "lattice_point") return KernelShape::lattice_point;
  if (name == "tabulated" || name == "custom") return KernelShape::tabulated;
  throw BadConfig("unknown kernel shape '" + name + "'");
}

double unit_sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw BadConfig("unsupported dimension");
  }
}

double unit_ball_volume(int dim) { return unit_sphere_area(dim) / dim; }

Point random_direction(int dim, Rng& rng) {
  Point u{};
  if (dim == 1) {
    u[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return u;
  }
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      u[a] = rng.normal();
      n2 += u[a] * u[a];
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (int a = 0; a < dim; ++a) u[a] *= inv;
  return u;
}

Kernel Kernel::tophat(int dim, double radius, double mass) {
  if (!(radius > 0.0)) throw BadKernel("tophat radius must be positive");
  if (!(mass > 0.0)) throw BadKernel("kernel mass must be positive");
  Kernel k(KernelShape::tophat, dim);
  k.a_ = radius;
  k.mass_ = mass;
  k.height_ = mass / (unit_ball_volume(dim) * std::pow(radius, dim));
  return k;
}

Kernel Kernel::tophat_height(int dim, double radius, double height) {
  if (!(height > 0.0)) throw BadKernel("tophat height must be positive");
  return tophat(dim, radius, height * unit_ball_volume(dim) * std::pow(radius, dim));
}

Kernel Kernel::annulus(int dim, double inner, double outer, double mass) {
  if (!(inner >= 0.0 && outer > inner)) throw BadKernel("annulus needs 0 <= inner < outer");
  if (!(mass > 0.0)) throw BadKernel("kernel mass must be positive");
  Kernel k(KernelShape::annulus, dim);
  k.a_ = inner;
  k.b_ = outer;
  k.mass_ = mass;
  k.height_ = mass / (unit_ball_volume(dim) * (std::pow(outer, dim) - std::pow(inner, dim)));
  return k;
}

Kernel Kernel::gaussian(int dim, double variance, double mass) {
  if (!(variance > 0.0)) throw BadKernel("gaussian variance must be positive");
  if (!(mass > 0.0)) throw BadKernel("kernel mass must be positive");
  Kernel k(KernelShape::gaussian, dim);
  k.var_ = variance;
  k.mass_ = mass;
  k.height_ = mass * std::pow(2.0 * std::numbers::pi * variance, -0.5 * dim);
  return k;
}

Kernel Kernel::lattice_nn(int dim) {
  Kernel k(KernelShape::lattice_nn, dim);
  k.height_ = 1.0 / (2.0 * dim);
  return k;
}

Kernel Kernel::lattice_point(int dim) {
  Kernel k(KernelShape::lattice_point, dim);
  k.height_ = 1.0;
  return k;
}

Kernel Kernel::tabulated(int dim, std::vector<double> radii, std::vector<double> values) {
  if (radii.size() < 2 || radii.size() != values.size()) {
    throw BadKernel("tabulated kernel needs >= 2 matching radii/values");
  }
  if (radii.front() != 0.0) throw BadKernel("tabulated radii must start at 0");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw BadKernel("tabulated radii must increase");
  }
  for (double v : values) {
    if (!(v >= 0.0)) throw BadKernel("tabulated values must be nonnegative");
  }
  Kernel k(KernelShape::tabulated, dim);
  k.radii_ = std::move(radii);
  k.values_ = std::move(values);
  // Exact integral of the piecewise-linear profile times the shell area.
  const double area = unit_sphere_area(dim);
  k.shell_cdf_.assign(k.radii_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < k.radii_.size(); ++i) {
    const double r0 = k.radii_[i], r1 = k.radii_[i + 1];
    const double s = (k.values_[i + 1] - k.values_[i]) / (r1 - r0);
    const double c = k.values_[i] - s * r0;
    auto prim = [&](double r) {
      return c * std::pow(r, dim) / dim + s * std::pow(r, dim + 1) / (dim + 1);
    };
    k.shell_cdf_[i + 1] = k.shell_cdf_[i] + area * (prim(r1) - prim(r0));
  }
  k.mass_ = k.shell_cdf_.back();
  if (!(k.mass_ > 0.0)) throw BadKernel("tabulated kernel has zero mass");
  return k;
}

double Kernel::at_radius(double r) const {
  switch (shape_) {
    case KernelShape::tophat:
      return r <= a_ ? height_ : 0.0;
    case KernelShape::annulus:
      return (r >= a_ && r <= b_) ? height_ : 0.0;
    case KernelShape::gaussian:
      return height_ * std::exp(-0.5 * r * r / var_);
    case KernelShape::lattice_nn:
      return r == 1.0 ? height_ : 0.0;
    case KernelShape::lattice_point:
      return r == 0.0 ? height_ : 0.0;
    case KernelShape::tabulated: {
      if (r > radii_.back()) return 0.0;
      auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
      if (it == radii_.end()) return values_.back();
      const std::size_t i = static_cast<std::size_t>(it - radii_.begin()) - 1;
      const double w = (r - radii_[i]) / (radii_[i + 1] - radii_[i]);
      return values_[i] + w * (values_[i + 1] - values_[i]);
    }
  }
  return 0.0;
}

double Kernel::operator()(const Point& z) const {
  if (shape_ == KernelShape::lattice_nn) {
    // exactly one unit coordinate
    int nonzero = 0;
    for (int a = 0; a < dim_; ++a) {
      if (z[a] == 0.0) continue;
      if (std::abs(z[a]) != 1.0) return 0.0;
      ++nonzero;
    }
    return nonzero == 1 ? height_ : 0.0;
  }
  if (shape_ == KernelShape::lattice_point) {
    for (int a = 0; a < dim_; ++a) {
      if (z[a] != 0.0) return 0.0;
    }
    return height_;
  }
  if (dim_ == 1) return at_radius(std::abs(z[0]));
  return at_radius(norm(z, dim_));
}

double Kernel::sup() const {
  if (shape_ == KernelShape::tabulated) {
    return *std::max_element(values_.begin(), values_.end());
  }
  return height_;
}

double Kernel::support_radius() const {
  switch (shape_) {
    case KernelShape::tophat: return a_;
    case KernelShape::annulus: return b_;
    case KernelShape::gaussian: return std::numeric_limits<double>::infinity();
    case KernelShape::lattice_nn: return 1.0;
    case KernelShape::lattice_point: return 0.0;
    case KernelShape::tabulated: return radii_.back();
  }
  return 0.0;
}

double Kernel::mass_below(double x) const {
  if (dim_ != 1) throw BadKernel("mass_below is defined for d = 1 only");
  switch (shape_) {
    case KernelShape::tophat:
      return height_ * std::clamp(x + a_, 0.0, 2.0 * a_);
    case KernelShape::annulus: {
      const double left = height_ * std::clamp(x + b_, 0.0, b_ - a_);
      const double right = height_ * std::clamp(x - a_, 0.0, b_ - a_);
      return left + right;
    }
    case KernelShape::gaussian:
      return mass_ * 0.5 * std::erfc(-x / std::sqrt(2.0 * var_));
    case KernelShape::lattice_nn:
      return 0.5 * (x >= -1.0 ? 1.0 : 0.0) + 0.5 * (x >= 1.0 ? 1.0 : 0.0);
    case KernelShape::lattice_point:
      return x >= 0.0 ? 1.0 : 0.0;
    case KernelShape::tabulated: {
      // shell_cdf_ counts both half-lines in d = 1
      const double y = std::min(std::abs(x), radii_.back());
      auto it = std::upper_bound(radii_.begin(), radii_.end(), y);
      std::size_t i = static_cast<std::size_t>(it - radii_.begin());
      i = i == 0 ? 0 : i - 1;
      if (i + 1 >= radii_.size()) i = radii_.size() - 2;
      const double r0 = radii_[i];
      const double s = (values_[i + 1] - values_[i]) / (radii_[i + 1] - r0);
      const double partial = values_[i] * (y - r0) + 0.5 * s * (y - r0) * (y - r0);
      const double half = 0.5 * shell_cdf_[i] + partial;
      return x >= 0.0 ? 0.5 * mass_ + half : 0.5 * mass_ - half;
    }
  }
  return 0.0;
}

namespace {

// int_l^h z^k dz
double power_integral(int k, double l, double h) {
  if (!(l < h)) return 0.0;
  return (std::pow(h, k + 1) - std::pow(l, k + 1)) / (k + 1);
}

}  // namespace

std::optional<double> Kernel::moment_between(int k, double lo, double hi) const {
  if (dim_ != 1) throw BadKernel("moment_between is defined for d = 1 only");
  if (k < 0 || k > 2) throw BadKernel("moment_between supports k = 0, 1, 2");
  if (!(lo < hi)) return 0.0;
  switch (shape_) {
    case KernelShape::tophat:
      return height_ * power_integral(k, std::max(lo, -a_), std::min(hi, a_));
    case KernelShape::annulus:
      return height_ * (power_integral(k, std::max(lo, -b_), std::min(hi, -a_)) +
                        power_integral(k, std::max(lo, a_), std::min(hi, b_)));
    case KernelShape::gaussian: {
      const double sd = std::sqrt(var_);
      auto density = [&](double z) {
        return std::isfinite(z) ? std::exp(-0.5 * z * z / var_) / (sd * std::sqrt(2.0 * std::numbers::pi)) : 0.0;
      };
      auto z_density = [&](double z) { return std::isfinite(z) ? z * density(z) : 0.0; };
      const double m0 = 0.5 * (std::erfc(-hi / (sd * std::sqrt(2.0))) -
                               std::erfc(-lo / (sd * std::sqrt(2.0))));
      if (k == 0) return mass_ * m0;
      if (k == 1) return mass_ * var_ * (density(lo) - density(hi));
      return mass_ * var_ * (m0 + z_density(lo) - z_density(hi));
    }
    default:
      return std::nullopt;
  }
}

std::vector<double> Kernel::radial_breakpoints() const {
  switch (shape_) {
    case KernelShape::tophat: return {a_};
    case KernelShape::annulus: return {a_, b_};
    case KernelShape::tabulated: return radii_;
    default: return {};
  }
}

double Kernel::sample_radius(Rng& rng) const {
  switch (shape_) {
    case KernelShape::tophat:
      return a_ * std::pow(rng.uniform_open(), 1.0 / dim_);
    case KernelShape::annulus: {
      const double ad = std::pow(a_, dim_), bd = std::pow(b_, dim_);
      return std::pow(ad + rng.uniform() * (bd - ad), 1.0 / dim_);
    }
    case KernelShape::tabulated: {
      const double target = rng.uniform() * mass_;
      auto it = std::upper_bound(shell_cdf_.begin(), shell_cdf_.end(), target);
      std::size_t i = static_cast<std::size_t>(it - shell_cdf_.begin());
      i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, radii_.size() - 2);
      const double r0 = radii_[i], r1 = radii_[i + 1];
      const double cap = std::max(values_[i], values_[i + 1]) * std::pow(r1, dim_ - 1);
      for (;;) {
        const double r = rng.uniform(r0, r1);
        const double w = at_radius(r) * std::pow(r, dim_ - 1);
        if (rng.uniform() * cap <= w) return r;
      }
    }
    default:
      return 0.0;
  }
}

Point Kernel::sample(Rng& rng) const {
  Point z{};
  switch (shape_) {
    case KernelShape::gaussian: {
      const double sd = std::sqrt(var_);
      for (int a = 0; a < dim_; ++a) z[a] = sd * rng.normal();
      return z;
    }
    case KernelShape::lattice_nn: {
      const auto axis = static_cast<int>(rng.index(static_cast<std::uint64_t>(dim_)));
      z[axis] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      return z;
    }
    case KernelShape::lattice_point:
      return z;
    default: {
      const double r = sample_radius(rng);
      const Point u = random_direction(dim_, rng);
      for (int a = 0; a < dim_; ++a) z[a] = r * u[a];
      return z;
    }
  }
}

double Kernel::numerical_mass() const {
  if (atomic()) return mass_;
  using boost::math::quadrature::gauss_kronrod;
  const double area = unit_sphere_area(dim_);
  auto integrand = [&](double r) { return at_radius(r) * area * std::pow(r, dim_ - 1); };
  std::vector<double> cuts{0.0};
  if (shape_ == KernelShape::gaussian) {
    cuts.push_back(14.0 * std::sqrt(var_));
  } else {
    for (double b : radial_breakpoints()) {
      if (b > cuts.back()) cuts.push_back(b);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // Gauss-Kronrod nodes are interior, so jumps at the cut points are harmless
    total += gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 15, 1e-12);
  }
  return total;
}

bool Kernel::same_law_as(const Kernel& o) const {
  return shape_ == o.shape_ && dim_ == o.dim_ && a_ == o.a_ && b_ == o.b_ && var_ == o.var_ &&
         std::abs(mass_ - o.mass_) <= 1e-15 * mass_ && radii_ == o.radii_ && values_ == o.values_;
}

}  // namespace bpdl
