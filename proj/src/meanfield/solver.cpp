#include "bpdl/meanfield/solver.hpp"

#include <algorithm>
#include <cmath>

#include "bpdl/errors.hpp"

namespace bpdl::meanfield {

Model make_model(const ModelParams& params, std::size_t nodes_per_axis, ConvolutionMethod method) {
  if (!params.constant_rates()) throw BadConfig("mean-field model needs constant rates");
  if (params.domain.mode() != DomainMode::torus) {
    throw BadConfig("mean-field model needs a torus domain");
  }
  const int d = params.dim();
  const double side = params.domain.side(0);
  for (int a = 1; a < d; ++a) {
    if (params.domain.side(a) != side) throw BadConfig("mean-field grid needs equal sides");
  }
  Model m;
  m.gamma = params.gamma.constant_value();
  m.mu = params.mu.constant_value();
  m.alpha = params.alpha.constant_value();
  m.grid = Grid(d, nodes_per_axis, side);
  m.dispersal = KernelStencil(params.dispersal, m.grid);
  m.competition = KernelStencil(params.competition, m.grid);
  m.method = method;
  return m;
}

Model make_model(double gamma, double mu, double alpha, const Kernel& dispersal,
                 const Kernel& competition, const Grid& grid, ConvolutionMethod method) {
  if (gamma < 0.0 || mu < 0.0 || alpha < 0.0) throw NegativeRate("mean-field rates must be >= 0");
  Model m;
  m.gamma = gamma;
  m.mu = mu;
  m.alpha = alpha;
  m.grid = grid;
  m.dispersal = KernelStencil(dispersal, grid);
  m.competition = KernelStencil(competition, grid);
  m.method = method;
  return m;
}

std::vector<double> rhs(const Model& model, const DensityField& field) {
  const auto& xi = field.values();
  const std::vector<double> xd = convolve(model.dispersal, xi, model.method);
  const std::vector<double> xu = convolve(model.competition, xi, model.method);
  std::vector<double> out(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) {
    out[k] = model.gamma * xd[k] - model.mu * xi[k] - model.alpha * xi[k] * xu[k];
  }
  return out;
}

double stable_dt(const Model& model, const DensityField& field) {
  return 0.1 / (model.gamma + model.mu + model.alpha * field.sup() * model.competition.mass());
}

namespace {

bool has_c0(const Model& m) { return m.alpha > 0.0 && m.gamma > m.mu; }

// one RK4 step in place; returns the clipped fraction of mass
double rk4_step(const Model& model, DensityField& xi, double h) {
  const std::size_t n = xi.size();
  DensityField tmp(xi.grid());
  const auto k1 = rhs(model, xi);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = xi[k] + 0.5 * h * k1[k];
  const auto k2 = rhs(model, tmp);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = xi[k] + 0.5 * h * k2[k];
  const auto k3 = rhs(model, tmp);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = xi[k] + h * k3[k];
  const auto k4 = rhs(model, tmp);
  double clipped = 0.0, total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double v = xi[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    }
    xi[k] = v;
    total += v;
  }
  return total > 0.0 ? clipped / total : (clipped > 0.0 ? 1.0 : 0.0);
}

}  // namespace

IntegrateResult integrate(const Model& model, const DensityField& field0, double T, double dt,
                          const std::vector<double>& output_times) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw BadConfig("integrate: need dt > 0 and T >= 0");
  std::vector<double> stops;
  for (double t : output_times) {
    if (t >= 0.0 && t <= T) stops.push_back(t);
  }
  std::sort(stops.begin(), stops.end());
  const std::size_t n_outputs = stops.size();
  stops.push_back(T);

  IntegrateResult res;
  DensityField xi = field0;
  const bool c0_ok = has_c0(model);
  const double c0 = c0_ok ? model.carrying_capacity() : 0.0;
  auto record = [&](double t) {
    res.times.push_back(t);
    res.masses.push_back(xi.mass());
    if (c0_ok) res.l2_to_c0.push_back(xi.l2_distance_sq(c0));
  };
  record(0.0);
  double t = 0.0;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const double stop = stops[i];
    const double span = stop - t;
    const auto steps = span > 0.0 ? static_cast<std::size_t>(std::ceil(span / dt - 1e-9)) : 0;
    const double h = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      if (h > stable_dt(model, xi) * (1.0 + 1e-9)) {
        throw StepTooLarge("step " + std::to_string(h) + " exceeds the stability bound " +
                           std::to_string(stable_dt(model, xi)) + " at t = " + std::to_string(t));
      }
      const double clip = rk4_step(model, xi, h);
      res.max_clip_fraction = std::max(res.max_clip_fraction, clip);
      if (clip > 1e-12) {
        throw StepTooLarge("positivity clipping removed a fraction " + std::to_string(clip) +
                           " of the mass at t = " + std::to_string(t));
      }
      t = s + 1 == steps ? stop : t + h;
      record(t);
    }
    t = stop;
    if (i < n_outputs) res.outputs.push_back(xi);
  }
  res.final_field = xi;
  return res;
}

PicardResult picard_iterate(const Model& model, const DensityField& field0, double T, int n_iters,
                            double window, int substeps) {
  if (substeps < 2) throw BadConfig("picard_iterate: need at least 2 substeps per window");
  if (!(window > 0.0)) throw BadConfig("picard_iterate: window must be positive");
  const std::size_t n = field0.size();
  const double sup0 = field0.sup();
  PicardResult res;
  DensityField start = field0;
  double t0 = 0.0;
  const auto windows = static_cast<std::size_t>(std::max(1.0, std::ceil(T / window - 1e-9)));
  for (std::size_t w = 0; w < windows && T > 0.0; ++w) {
    const double len = (w + 1 == windows) ? T - t0 : window;
    const auto m = static_cast<std::size_t>(substeps);
    const double dl = len / static_cast<double>(m);
    // path[j] = iterate at t0 + j dl; the zeroth iterate is frozen at the
    // window start
    std::vector<DensityField> path(m + 1, start);
    std::vector<std::vector<double>> a(m + 1), b(m + 1);
    double change = 0.0;
    for (int it = 0; it < n_iters; ++it) {
      for (std::size_t j = 0; j <= m; ++j) {
        a[j] = convolve(model.dispersal, path[j].values(), model.method);
        b[j] = convolve(model.competition, path[j].values(), model.method);
        for (std::size_t k = 0; k < n; ++k) {
          a[j][k] *= model.gamma;
          b[j][k] = model.mu + model.alpha * b[j][k];
        }
      }
      std::vector<DensityField> next(m + 1, start);
      for (std::size_t j = 0; j < m; ++j) {
        const bool fwd = j + 2 <= m;
        for (std::size_t k = 0; k < n; ++k) {
          // quadratic interpolation through three neighbouring nodes
          auto mid = [&](const std::vector<std::vector<double>>& g) {
            return fwd ? (3.0 * g[j][k] + 6.0 * g[j + 1][k] - g[j + 2][k]) / 8.0
                       : (-g[j - 1][k] + 6.0 * g[j][k] + 3.0 * g[j + 1][k]) / 8.0;
          };
          const double bm = mid(b), am = mid(a);
          const double b0 = b[j][k], b1 = b[j + 1][k];
          const double full = dl * (b0 + 4.0 * bm + b1) / 6.0;
          const double second_half = dl * (-b0 + 8.0 * bm + 5.0 * b1) / 24.0;
          const double decay = std::exp(-full);
          next[j + 1][k] = next[j][k] * decay +
                           dl / 6.0 *
                               (a[j][k] * decay + 4.0 * am * std::exp(-second_half) + a[j + 1][k]);
        }
      }
      change = 0.0;
      for (std::size_t j = 0; j <= m; ++j) {
        change = std::max(change, next[j].sup_distance(path[j]));
        const double bound = sup0 * std::exp(model.gamma * (t0 + static_cast<double>(j) * dl));
        if (bound > 0.0) res.max_growth_ratio = std::max(res.max_growth_ratio, next[j].sup() / bound);
      }
      path.swap(next);
    }
    res.last_sweep_change.push_back(change);
    start = path[m];
    t0 += len;
  }
  res.field = start;
  return res;
}

}  // namespace bpdl::meanfield
