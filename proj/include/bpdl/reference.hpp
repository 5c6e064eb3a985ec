#pragma once

#include <optional>

#include "bpdl/params.hpp"
#include "bpdl/population.hpp"
#include "bpdl/rng.hpp"

namespace bpdl {

/// Brute-force sum_j U(x, x_j) over every individual, including one
/// sitting at x itself. The double-loop oracle for the indexed engine.
double competition_sum(const Population& pop, const Point& x, const ModelParams& params);

/// <nu (x) nu, U> = sum_i sum_j U(x_i, x_j), computed row by row.
double total_interaction(const Population& pop, const ModelParams& params);
/// The same double sum accumulated column by column (U symmetric, so the
/// two agree exactly for exact-valued kernels).
double total_interaction_transposed(const Population& pop, const ModelParams& params);

/// Draws a seed position for a parent at x: z from the envelope D_env,
/// accepted with probability D(z) / (C D_env(z)), repeated until accepted.
/// Returns nullopt when the seed lands outside a box domain.
std::optional<Point> sample_dispersal(const ModelParams& params, const Point& x, Rng& rng);

/// Same, also reporting how many proposals were needed.
std::optional<Point> sample_dispersal(const ModelParams& params, const Point& x, Rng& rng,
                                      std::size_t& proposals);

/// Poisson configuration of the given intensity on a bounded window.
Population poisson_configuration(const SpatialDomain& window, double intensity, Rng& rng);

/// Largest number of individuals sharing exactly the same position.
std::size_t multiplicity_check(const Population& pop);

}  // namespace bpdl
