#include "bpdl/meanfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "bpdl/errors.hpp"

namespace bpdl::meanfield {

Grid::Grid(int dim_, std::size_t n_, double side_) : dim(dim_), n(n_), side(side_) {
  if (dim < 1 || dim > 2) throw BadConfig("grid: only d = 1 and d = 2 are supported");
  if (n < 4) throw BadConfig("grid: need at least 4 nodes per axis");
  if (!(side > 0.0)) throw BadConfig("grid: side must be positive");
}

Point Grid::node(std::size_t k) const {
  Point p{};
  if (dim == 1) {
    p[0] = -0.5 * side + static_cast<double>(k) * h();
  } else {
    p[0] = -0.5 * side + static_cast<double>(k / n) * h();
    p[1] = -0.5 * side + static_cast<double>(k % n) * h();
  }
  return p;
}

DensityField::DensityField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw BadConfig("density field: size does not match grid");
}

DensityField DensityField::from_function(const Grid& grid,
                                         const std::function<double(const Point&)>& fn) {
  DensityField f(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f[k] = fn(grid.node(k));
  return f;
}

double DensityField::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

double DensityField::sup() const { return *std::max_element(values_.begin(), values_.end()); }
double DensityField::inf() const { return *std::min_element(values_.begin(), values_.end()); }

double DensityField::l2_distance_sq(double c) const {
  double s = 0.0;
  for (double v : values_) s += (v - c) * (v - c);
  return s * grid_.cell_volume();
}

double DensityField::sup_distance(double c) const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v - c));
  return s;
}

double DensityField::sup_distance(const DensityField& other) const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s = std::max(s, std::abs(values_[k] - other[k]));
  return s;
}

namespace {

// signed minimal-image offset along one axis
double axis_offset(std::size_t o, const Grid& g) {
  const auto n = static_cast<std::ptrdiff_t>(g.n);
  auto m = static_cast<std::ptrdiff_t>(o);
  if (m >= (n + 1) / 2) m -= n;
  return static_cast<double>(m) * g.h();
}

constexpr int kSubsamples2d = 8;

}  // namespace

KernelStencil::KernelStencil(const Kernel& kernel, const Grid& grid) : grid_(grid) {
  if (kernel.atomic()) throw BadKernel("stencils need a continuous kernel");
  if (kernel.dim() != grid.dim) throw BadKernel("stencil: kernel dimension differs from grid");
  mass_ = kernel.mass();
  const double h = grid.h();
  const double reach = std::isfinite(kernel.support_radius())
                           ? kernel.support_radius()
                           : 14.0 * std::sqrt(kernel.variance());
  const int images = static_cast<int>(std::ceil(reach / grid.side)) + 1;
  dense_.assign(grid.size(), 0.0);
  values_.assign(grid.size(), 0.0);
  for (std::size_t o = 0; o < grid.size(); ++o) {
    Point z{};
    double w = 0.0;
    if (grid.dim == 1) {
      z[0] = axis_offset(o, grid);
      for (int j = -images; j <= images; ++j) {
        const double c = z[0] + j * grid.side;
        if (std::abs(c) - 0.5 * h > reach) continue;
        w += kernel.mass_between(c - 0.5 * h, c + 0.5 * h);
      }
    } else {
      z[0] = axis_offset(o / grid.n, grid);
      z[1] = axis_offset(o % grid.n, grid);
      const double sub = h / kSubsamples2d;
      for (int j0 = -images; j0 <= images; ++j0) {
        for (int j1 = -images; j1 <= images; ++j1) {
          const double c0 = z[0] + j0 * grid.side;
          const double c1 = z[1] + j1 * grid.side;
          if (std::hypot(c0, c1) - h > reach) continue;
          double acc = 0.0;
          for (int a = 0; a < kSubsamples2d; ++a) {
            for (int b = 0; b < kSubsamples2d; ++b) {
              Point q{};
              q[0] = c0 - 0.5 * h + (a + 0.5) * sub;
              q[1] = c1 - 0.5 * h + (b + 0.5) * sub;
              acc += kernel(q);
            }
          }
          w += acc * sub * sub;
        }
      }
    }
    values_[o] = kernel(z);
    dense_[o] = w;
    raw_mass_ += w;
  }
  if (!(raw_mass_ > 0.0)) throw BadKernel("stencil: kernel is not resolved by the grid");
  const double factor = mass_ / raw_mass_;
  for (std::size_t o = 0; o < grid.size(); ++o) {
    dense_[o] *= factor;
    if (dense_[o] != 0.0) {
      offsets_.push_back(o);
      weights_.push_back(dense_[o]);
    }
  }
}

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> convolve_direct(const KernelStencil& s, const std::vector<double>& f) {
  const Grid& g = s.grid();
  std::vector<double> out(f.size(), 0.0);
  const auto& offs = s.offsets();
  const auto& ws = s.weights();
  if (g.dim == 1) {
    const std::size_t n = g.n;
    for (std::size_t q = 0; q < offs.size(); ++q) {
      const std::size_t o = offs[q];
      const double w = ws[q];
      // out[k] += w f[k - o]
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = k >= o ? k - o : k + n - o;
        out[k] += w * f[src];
      }
    }
    return out;
  }
  const std::size_t n = g.n;
  for (std::size_t q = 0; q < offs.size(); ++q) {
    const std::size_t o0 = offs[q] / n, o1 = offs[q] % n;
    const double w = ws[q];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t si = i >= o0 ? i - o0 : i + n - o0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t sj = j >= o1 ? j - o1 : j + n - o1;
        out[i * n + j] += w * f[si * n + sj];
      }
    }
  }
  return out;
}

std::vector<double> convolve_fft(const KernelStencil& s, const std::vector<double>& f) {
  const Grid& g = s.grid();
  const int n = static_cast<int>(g.n);
  const std::size_t total = g.size();
  const std::size_t spec = g.dim == 1 ? g.n / 2 + 1 : g.n * (g.n / 2 + 1);
  std::vector<double> in_f(f), in_k(s.dense()), out(total);
  std::vector<std::complex<double>> sf(spec), sk(spec);
  auto* cf = reinterpret_cast<fftw_complex*>(sf.data());
  auto* ck = reinterpret_cast<fftw_complex*>(sk.data());
  fftw_plan pf, pk, pb;
  {
    std::lock_guard lock(planner_mutex());
    if (g.dim == 1) {
      pf = fftw_plan_dft_r2c_1d(n, in_f.data(), cf, FFTW_ESTIMATE);
      pk = fftw_plan_dft_r2c_1d(n, in_k.data(), ck, FFTW_ESTIMATE);
      pb = fftw_plan_dft_c2r_1d(n, cf, out.data(), FFTW_ESTIMATE);
    } else {
      pf = fftw_plan_dft_r2c_2d(n, n, in_f.data(), cf, FFTW_ESTIMATE);
      pk = fftw_plan_dft_r2c_2d(n, n, in_k.data(), ck, FFTW_ESTIMATE);
      pb = fftw_plan_dft_c2r_2d(n, n, cf, out.data(), FFTW_ESTIMATE);
    }
  }
  // ESTIMATE planning leaves the input arrays untouched
  fftw_execute(pf);
  fftw_execute(pk);
  for (std::size_t k = 0; k < spec; ++k) sf[k] *= sk[k];
  fftw_execute(pb);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(pf);
    fftw_destroy_plan(pk);
    fftw_destroy_plan(pb);
  }
  const double scale = 1.0 / static_cast<double>(total);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace

std::vector<double> convolve(const KernelStencil& stencil, const std::vector<double>& values,
                             ConvolutionMethod method) {
  if (values.size() != stencil.grid().size()) {
    throw BadConfig("convolve: field and stencil live on different grids");
  }
  if (method == ConvolutionMethod::automatic) {
    method = stencil.offsets().size() > 32 && values.size() >= 512 ? ConvolutionMethod::fft
                                                                     : ConvolutionMethod::direct;
  }
  return method == ConvolutionMethod::fft ? convolve_fft(stencil, values)
                                          : convolve_direct(stencil, values);
}

}  // namespace bpdl::meanfield
