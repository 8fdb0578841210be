#ifndef MIXEST_DIVERGENCE_HPP
#define MIXEST_DIVERGENCE_HPP

#include <span>

#include "mixest/density.hpp"

namespace mixest {

/// L1 / squared-L2 / total-variation distances between two densities.
struct Distances {
  double l1 = 0.0;
  double l2_sq = 0.0;
  double tv = 0.0;  // l1 / 2
};

/// Full divergence report for a density pair under a lifting density.
struct DivergenceReport {
  double klh = 0.0;
  double l1 = 0.0;
  double l2_sq = 0.0;
  double tv = 0.0;
};

/// h-lifted KL divergence: integral of (f+h) log((f+h)/(g+h)).
/// Breakpoints of all three handles are merged into the spec.
double klh(const Density& f, const Density& g, const Density& h, const QuadratureSpec& spec);

/// Classical KL divergence by quadrature, with the t log t -> 0 convention.
/// Arguments are arbitrary callables so lifted halves (f+h)/2 can be passed.
double kl_quadrature(const std::function<double(double)>& p,
                     const std::function<double(double)>& q,
                     const QuadratureSpec& spec);

/// Two-sample h-MLLE objective L_{h,n}(psi) of the MM algorithm.
double empirical_klh_objective(const MixtureParams& psi, const Density& h,
                               std::span<const double> xs, std::span<const double> ys);

/// Closed-form KL divergence between beta distributions (digamma form).
/// Diagnostic: shapes need only be positive, not box-constrained.
double beta_kl_closed_form(double a_p, double b_p, double a_q, double b_q);

/// L1, squared L2, and TV = L1/2 by quadrature.
Distances distances(const Density& f, const Density& g, const QuadratureSpec& spec);

DivergenceReport divergence_report(const Density& f, const Density& g, const Density& h,
                                   const QuadratureSpec& spec);

/// Second derivative of pi |-> KL_h(f || (1-pi) p + pi q):
/// integral of (f+h) (p-q)^2 / [(1-pi) p + pi q + h]^2.
double curvature_along_segment(const Density& p, const Density& q, const Density& h,
                               const Density& f, double pi,
                               const QuadratureSpec& spec = {});

}  // namespace mixest

#endif
