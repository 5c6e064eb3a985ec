#pragma once

#include <optional>

#include "bpdl/domain.hpp"
#include "bpdl/kernel.hpp"
#include "bpdl/rate_field.hpp"

namespace bpdl {

/// Validated model parameters: rate fields, their envelope constants, the
/// competition kernel U, the dispersal density D with its envelope
/// C * D_env, and the state space.
struct ModelParams {
  RateField gamma;  // seed production
  RateField mu;     // intrinsic death
  RateField alpha;  // competition sensitivity
  double gamma_bar = 0.0;
  double mu_bar = 0.0;
  double alpha_bar = 0.0;
  double u_bar = 0.0;
  Kernel competition = Kernel::tophat_height(1, 0.5, 1.0);
  Kernel dispersal = Kernel::tophat(1, 3.0);
  Kernel envelope = Kernel::tophat(1, 3.0);
  double envelope_const = 1.0;
  SpatialDomain domain = SpatialDomain::unbounded(1);

  int dim() const { return domain.dim(); }
  double u(const Point& x, const Point& y) const {
    return competition(domain.displacement(x, y));
  }
  bool constant_rates() const {
    return gamma.is_constant() && mu.is_constant() && alpha.is_constant();
  }
  /// True when D_env = D and C = 1, so dispersal needs no rejection.
  bool exact_dispersal() const {
    return envelope_const == 1.0 && envelope.same_law_as(dispersal);
  }
};

/// Unvalidated parameter description, as read from a config file.
struct ParamSpec {
  RateField gamma = RateField::constant(0.0);
  RateField mu = RateField::constant(0.0);
  RateField alpha = RateField::constant(0.0);
  std::optional<double> gamma_bar;
  std::optional<double> mu_bar;
  std::optional<double> alpha_bar;
  std::optional<double> u_bar;
  Kernel competition = Kernel::tophat_height(1, 0.5, 1.0);
  std::optional<double> competition_declared_mass;
  Kernel dispersal = Kernel::tophat(1, 3.0);
  std::optional<double> dispersal_declared_mass;
  std::optional<Kernel> envelope;
  std::optional<double> envelope_const;
  SpatialDomain domain = SpatialDomain::unbounded(1);
  /// Half-width of the probe window used on unbounded domains.
  double probe_extent = 50.0;
};

/// Validates a parameter description and tightens envelope constants to
/// the suprema where those are known exactly.
///
/// Throws NegativeRate, EnvelopeViolated or BadKernel.
ModelParams make_params(const ParamSpec& spec);

/// The reference preset: gamma = 5, mu = 1, alpha = 1, U = 1{|x-y| <= 1/2},
/// D = (1/6) 1{|z| <= 3}, d = 1, on the given domain.
ParamSpec reference_spec(const SpatialDomain& domain);

/// Carrying capacity (gamma - mu) / alpha for constant rates.
double carrying_capacity(const ModelParams& params);

}  // namespace bpdl
