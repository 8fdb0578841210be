#ifndef MIXEST_NUMERICS_HPP
#define MIXEST_NUMERICS_HPP

#include <functional>
#include <stdexcept>
#include <vector>

namespace mixest {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ln Gamma(x) for x > 0 via the Lanczos approximation (g = 7, 9 coefficients).
double log_gamma(double x);

/// Digamma psi(x) for x > 0: recurrence shift to x >= 6, then the asymptotic series.
double digamma(double x);

/// Trigamma psi'(x) for x > 0, same shift-then-series scheme. Strictly positive.
double trigamma(double x);

/// Composite Gauss-Legendre quadrature layout on [0,1].
/// Panels are delimited by {0} U breakpoints U {1}; panel endpoints are inset
/// by edge_inset so integrands with integrable endpoint singularities
/// (e.g. the arcsine density) are never evaluated at the singular points.
struct QuadratureSpec {
  std::vector<double> breakpoints;  // strictly increasing, all in (0,1)
  int points_per_panel = 64;
  double edge_inset = 1e-12;

  void validate() const;

  /// Merges extra interior breakpoints, deduplicated and sorted.
  QuadratureSpec with_breakpoints(const std::vector<double>& extra) const;
};

/// Gauss-Legendre nodes and weights on [-1,1]; cached per point count.
const std::vector<std::pair<double, double>>& gauss_legendre(int points);

/// Integrates f over [0,1] per the spec. Throws IntegrationError if any node
/// evaluation is non-finite.
double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec);

}  // namespace mixest

#endif
