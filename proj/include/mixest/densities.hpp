#ifndef MIXEST_DENSITIES_HPP
#define MIXEST_DENSITIES_HPP

#include "mixest/rng.hpp"

namespace mixest {

// Box constraints for the beta component parameter space. Every component
// density over this box is bounded and Lipschitz in its parameters.
inline constexpr double kThetaMin = 1.0;
inline constexpr double kThetaMax = 50.0;

/// One beta component's parameter pair theta = (a, b).
struct ComponentParams {
  double a = 1.0;
  double b = 1.0;

  void validate() const;
  bool operator==(const ComponentParams&) const = default;
};

/// Beta density at x for arbitrary positive shapes (not box-restricted;
/// used both for components and for diagnostics).
double beta_pdf(double x, double a, double b);
inline double beta_pdf(double x, const ComponentParams& p) { return beta_pdf(x, p.a, p.b); }

/// log beta_pdf; -inf where the density vanishes.
double beta_log_pdf(double x, double a, double b);

/// Pointwise supremum of the beta density with the given shapes (mode value).
double beta_sup(double a, double b);

/// Two-bump target: 5/4 on [0,2/5] U [3/5,1], zero between (normalized).
double target_f1(double x);

/// V-shaped target: 2-4x on [0,1/2], -2+4x on (1/2,1].
double target_f2(double x);

/// Arcsine density Beta(1/2,1/2); diverges at the endpoints.
double arcsine_pdf(double x);

/// Draw from Gamma(shape, 1) by Marsaglia-Tsang (boosted below shape 1).
double sample_gamma(double shape, RngStream& rng);

/// Draw from Beta(a, b) as a ratio of gamma variates.
double sample_beta(double a, double b, RngStream& rng);

}  // namespace mixest

#endif
