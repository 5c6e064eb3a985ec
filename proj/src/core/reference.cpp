#include "bpdl/reference.hpp"

#include <algorithm>

#include "bpdl/errors.hpp"

namespace bpdl {

double competition_sum(const Population& pop, const Point& x, const ModelParams& params) {
  double s = 0.0;
  for (const Point& y : pop.positions()) s += params.u(x, y);
  return s;
}

double total_interaction(const Population& pop, const ModelParams& params) {
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < pop.size(); ++j) row += params.u(pop[i], pop[j]);
    total += row;
  }
  return total;
}

double total_interaction_transposed(const Population& pop, const ModelParams& params) {
  double total = 0.0;
  for (std::size_t j = 0; j < pop.size(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) col += params.u(pop[j], pop[i]);
    total += col;
  }
  return total;
}

std::optional<Point> sample_dispersal(const ModelParams& params, const Point& x, Rng& rng,
                                      std::size_t& proposals) {
  const int d = params.dim();
  Point z{};
  proposals = 0;
  if (params.exact_dispersal()) {
    ++proposals;
    z = params.dispersal.sample(rng);
  } else {
    for (;;) {
      ++proposals;
      z = params.envelope.sample(rng);
      const double accept = params.dispersal(z) / (params.envelope_const * params.envelope(z));
      if (accept > 1.0 + 1e-12) {
        throw EnvelopeViolated("dispersal acceptance ratio exceeds 1");
      }
      if (rng.uniform() < accept) break;
    }
  }
  Point y = x;
  for (int a = 0; a < d; ++a) y[a] += z[a];
  return params.domain.place(y);
}

std::optional<Point> sample_dispersal(const ModelParams& params, const Point& x, Rng& rng) {
  std::size_t proposals = 0;
  return sample_dispersal(params, x, rng, proposals);
}

Population poisson_configuration(const SpatialDomain& window, double intensity, Rng& rng) {
  if (!window.bounded()) throw BadConfig("Poisson window must be bounded");
  if (intensity < 0.0) throw BadConfig("Poisson intensity must be nonnegative");
  Population pop(window.dim());
  const std::uint64_t n = rng.poisson(intensity * window.volume());
  for (std::uint64_t i = 0; i < n; ++i) pop.add(window.sample_uniform(rng));
  return pop;
}

std::size_t multiplicity_check(const Population& pop) {
  if (pop.empty()) return 0;
  std::vector<Point> pts(pop.positions().begin(), pop.positions().end());
  std::sort(pts.begin(), pts.end());
  std::size_t best = 1, run = 1;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    run = pts[i] == pts[i - 1] ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace bpdl
