#include "bpdl/stats/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "bpdl/errors.hpp"
#include "bpdl/sim/cell_index.hpp"

namespace bpdl::stats {

namespace {

void require_replicates(const std::vector<sim::Trace>& traces) {
  if (traces.size() < 2) throw BadConfig("ensemble estimators need at least two replicates");
}

const sim::Snapshot& positions_at(const sim::Trace& tr, double t) {
  const sim::Snapshot& s = tr.at(t);
  if (s.count > 0 && s.coords.empty()) {
    throw NoSnapshot("snapshot at t = " + std::to_string(t) + " carries no positions");
  }
  return s;
}

// Calls fn(displacement) for every ordered pair i != j within `reach`
// (all pairs when reach is infinite).
template <class Fn>
void for_each_pair(const Population& pop, const SpatialDomain& domain, double reach, Fn&& fn) {
  const std::size_t n = pop.size();
  if (n < 2) return;
  if (n <= 256 || !std::isfinite(reach)) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) fn(domain.displacement(pop[j], pop[i]));
      }
    }
    return;
  }
  sim::CellIndex index(domain, reach);
  for (std::size_t i = 0; i < n; ++i) index.insert(static_cast<std::uint32_t>(i), pop[i]);
  for (std::size_t i = 0; i < n; ++i) {
    index.for_each_candidate(pop[i], [&](std::uint32_t j) {
      if (j != i) fn(domain.displacement(pop[j], pop[i]));
    });
  }
}

double jackknife_se(const std::vector<double>& loo) {
  const double m = static_cast<double>(loo.size());
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= m;
  double s = 0.0;
  for (double v : loo) s += (v - mean) * (v - mean);
  return std::sqrt((m - 1.0) / m * s);
}

// c = P/V - (N/V)^2 I with its leave-one-out standard error.
PairTerm centered_pair_term(const std::vector<double>& pairs, const std::vector<double>& counts,
                            double volume, double integral) {
  const double r = static_cast<double>(pairs.size());
  double sp = 0.0, sn = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    sp += pairs[k];
    sn += counts[k];
  }
  auto theta = [&](double p, double nc) {
    const double n = nc / volume;
    return p / volume - n * n * integral;
  };
  PairTerm out;
  out.value = theta(sp / r, sn / r);
  std::vector<double> loo(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    loo[k] = theta((sp - pairs[k]) / (r - 1.0), (sn - counts[k]) / (r - 1.0));
  }
  out.stderr_ = jackknife_se(loo);
  return out;
}

double lag_norm(const Point& z, int dim) { return norm(z, dim); }

}  // namespace

EnsembleStat estimate_count(const std::vector<sim::Trace>& traces, double t,
                            const std::optional<SpatialDomain>& window) {
  require_replicates(traces);
  std::vector<double> xs;
  xs.reserve(traces.size());
  for (const auto& tr : traces) {
    if (!window) {
      xs.push_back(static_cast<double>(tr.at(t).count));
      continue;
    }
    const sim::Snapshot& s = positions_at(tr, t);
    const Population pop = s.population(tr.dim);
    std::size_t inside = 0;
    for (const Point& x : pop.positions()) inside += window->contains(x) ? 1 : 0;
    xs.push_back(static_cast<double>(inside));
  }
  const Summary s = summarize(xs);
  return {t, s.mean, s.variance, s.stderr_, s.n};
}

CovarianceEstimate covariance_measure(const std::vector<sim::Trace>& traces, double t,
                                      const SpatialDomain& domain, std::vector<double> edges) {
  require_replicates(traces);
  if (!domain.periodic()) throw BadConfig("covariance measure needs a torus domain");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end() || edges.front() < 0.0) {
    throw BadConfig("covariance measure: lag bin edges must be increasing and nonnegative");
  }
  const int d = domain.dim();
  const std::size_t nb = edges.size() - 1;
  const double volume = domain.volume();
  std::vector<std::vector<double>> pairs(nb, std::vector<double>(traces.size(), 0.0));
  std::vector<double> counts(traces.size());
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const sim::Snapshot& s = positions_at(traces[r], t);
    const Population pop = s.population(traces[r].dim);
    counts[r] = static_cast<double>(pop.size());
    for_each_pair(pop, domain, edges.back(), [&](const Point& z) {
      const double dist = lag_norm(z, d);
      const auto it = std::upper_bound(edges.begin(), edges.end(), dist);
      if (it == edges.begin() || it == edges.end()) return;
      pairs[static_cast<std::size_t>(it - edges.begin()) - 1][r] += 1.0;
    });
  }
  CovarianceEstimate out;
  out.t = t;
  out.volume = volume;
  out.n_replicates = traces.size();
  double total = 0.0;
  for (double c : counts) total += c;
  out.intensity = total / static_cast<double>(traces.size()) / volume;
  for (std::size_t k = 0; k < nb; ++k) {
    // int phi_k = volume of the shell between the two radii
    const double shell = unit_ball_volume(d) * (std::pow(edges[k + 1], d) - std::pow(edges[k], d));
    const PairTerm term = centered_pair_term(pairs[k], counts, volume, shell);
    out.value.push_back(term.value);
    out.stderr_.push_back(term.stderr_);
  }
  out.edges = std::move(edges);
  return out;
}

PairTerm covariance_term(const std::vector<sim::Trace>& traces, double t,
                         const SpatialDomain& domain, const std::function<double(const Point&)>& phi,
                         double phi_integral, double reach) {
  require_replicates(traces);
  if (!domain.periodic()) throw BadConfig("covariance term needs a torus domain");
  std::vector<double> pairs(traces.size(), 0.0), counts(traces.size());
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const sim::Snapshot& s = positions_at(traces[r], t);
    const Population pop = s.population(traces[r].dim);
    counts[r] = static_cast<double>(pop.size());
    for_each_pair(pop, domain, reach, [&](const Point& z) { pairs[r] += phi(z); });
  }
  return centered_pair_term(pairs, counts, domain.volume(), phi_integral);
}

MomentResidual moment_residual(const std::vector<sim::Trace>& traces, double t, double dt,
                               const ModelParams& params, std::size_t resamples, double level,
                               std::uint64_t seed) {
  require_replicates(traces);
  if (!params.domain.periodic()) throw BadConfig("moment residual needs a torus domain");
  if (!params.constant_rates()) throw BadConfig("moment residual needs constant rates");
  if (!(dt > 0.0)) throw BadConfig("moment residual needs dt > 0");
  const double g = params.gamma.constant_value();
  const double m = params.mu.constant_value();
  const double a = params.alpha.constant_value();
  const double u0 = params.competition(Point{});
  const double u_mass = params.competition.mass();
  const double volume = params.domain.volume();
  const std::size_t R = traces.size();
  std::vector<double> diff(R), count(R), pairs(R, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    const auto& tr = traces[r];
    diff[r] = (static_cast<double>(tr.at(t + dt).count) - static_cast<double>(tr.at(t - dt).count)) /
              (2.0 * dt);
    const sim::Snapshot& s = positions_at(tr, t);
    const Population pop = s.population(tr.dim);
    count[r] = static_cast<double>(pop.size());
    for_each_pair(pop, params.domain, params.competition.support_radius(),
                  [&](const Point& z) { pairs[r] += params.competition(z); });
  }
  struct Parts {
    double n, deriv, cov, rhs;
  };
  auto parts = [&](std::span<const std::size_t> idx) {
    double sd = 0.0, sn = 0.0, sp = 0.0;
    for (std::size_t k : idx) {
      sd += diff[k];
      sn += count[k];
      sp += pairs[k];
    }
    const double k = static_cast<double>(idx.size());
    Parts p;
    p.n = sn / k / volume;
    p.deriv = sd / k / volume;
    p.cov = sp / k / volume - p.n * p.n * u_mass;
    p.rhs = p.n * (g - m - a * p.n) - a * u0 * p.n - a * p.cov;
    return p;
  };
  std::vector<std::size_t> all(R);
  for (std::size_t k = 0; k < R; ++k) all[k] = k;
  const Parts full = parts(all);
  MomentResidual out;
  out.t = t;
  out.intensity = full.n;
  out.derivative = full.deriv;
  out.covariance_u = full.cov;
  out.rhs = full.rhs;
  out.residual = full.deriv - full.rhs;
  out.n_replicates = R;
  out.ci = bootstrap_ci(
      R,
      [&](std::span<const std::size_t> idx) {
        const Parts p = parts(idx);
        return p.deriv - p.rhs;
      },
      resamples, level, seed);
  return out;
}

Histogram density_histogram(const std::vector<sim::Trace>& traces, double t,
                            std::vector<double> edges) {
  require_replicates(traces);
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw BadConfig("density histogram: bin edges must be increasing");
  }
  const std::size_t nb = edges.size() - 1;
  std::vector<std::vector<double>> per(nb, std::vector<double>(traces.size(), 0.0));
  for (std::size_t r = 0; r < traces.size(); ++r) {
    if (traces[r].dim != 1) throw BadConfig("density histogram is implemented for d = 1");
    const sim::Snapshot& s = positions_at(traces[r], t);
    for (double x : s.coords) {
      const auto it = std::upper_bound(edges.begin(), edges.end(), x);
      if (it == edges.begin() || it == edges.end()) continue;
      per[static_cast<std::size_t>(it - edges.begin()) - 1][r] += 1.0;
    }
  }
  Histogram h;
  h.n_replicates = traces.size();
  for (std::size_t k = 0; k < nb; ++k) {
    const double width = edges[k + 1] - edges[k];
    const Summary s = summarize(per[k]);
    h.intensity.push_back(s.mean / width);
    h.stderr_.push_back(s.stderr_ / width);
  }
  h.edges = std::move(edges);
  return h;
}

double interaction_load(const Population& pop, const ModelParams& params, double r) {
  const int d = pop.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (norm(pop[i], d) > r) continue;
    for (std::size_t j = 0; j < pop.size(); ++j) total += params.u(pop[i], pop[j]);
  }
  return total;
}

}  // namespace bpdl::stats
