#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "bpdl/domain.hpp"
#include "bpdl/kernel.hpp"

namespace bpdl::meanfield {

/// Uniform periodic mesh on the torus [-L/2, L/2)^d, d <= 2, with n nodes
/// per axis at x_k = -L/2 + k h, h = L / n.
struct Grid {
  int dim = 1;
  std::size_t n = 0;
  double side = 0.0;

  Grid() = default;
  Grid(int dim, std::size_t n, double side);

  double h() const { return side / static_cast<double>(n); }
  double cell_volume() const { return dim == 1 ? h() : h() * h(); }
  std::size_t size() const { return dim == 1 ? n : n * n; }
  /// Coordinates of node `k` (row-major, last axis fastest).
  Point node(std::size_t k) const;

  bool operator==(const Grid&) const = default;
};

/// Gridded nonnegative density (plants per unit volume).
class DensityField {
 public:
  DensityField() = default;
  explicit DensityField(const Grid& grid, double value = 0.0)
      : grid_(grid), values_(grid.size(), value) {}
  DensityField(const Grid& grid, std::vector<double> values);

  static DensityField from_function(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// <xi, 1> = h^d sum of values.
  double mass() const;
  double sup() const;
  double inf() const;
  /// h^d sum (xi - c)^2.
  double l2_distance_sq(double c) const;
  double sup_distance(double c) const;
  double sup_distance(const DensityField& other) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// A kernel sampled on grid offsets: each weight is the kernel mass of the
/// mesh cell around that offset (exact in d = 1, sub-sampled in d = 2),
/// wrapped onto the torus, then renormalized to the exact kernel mass so
/// that constants are convolved exactly.
class KernelStencil {
 public:
  KernelStencil() = default;
  KernelStencil(const Kernel& kernel, const Grid& grid);

  const Grid& grid() const { return grid_; }
  double mass() const { return mass_; }
  /// Sum of the cell weights before renormalization.
  double raw_mass() const { return raw_mass_; }
  /// Nonzero weights: flattened offsets (row-major wrapped index) and
  /// values.
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Full periodic weight array on the grid (index = wrapped offset).
  const std::vector<double>& dense() const { return dense_; }
  /// Kernel value at offset `k` (midpoint), used for pointwise checks.
  double value_at_offset(std::size_t k) const { return values_[k]; }

 private:
  Grid grid_;
  double mass_ = 0.0;
  double raw_mass_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<double> weights_;
  std::vector<double> dense_;
  std::vector<double> values_;
};

enum class ConvolutionMethod { direct, fft, automatic };

/// Periodic convolution (xi * K)(x_k) = sum_j w_j xi(x_k - y_j).
std::vector<double> convolve(const KernelStencil& stencil, const std::vector<double>& values,
                             ConvolutionMethod method = ConvolutionMethod::automatic);

}  // namespace bpdl::meanfield
