#ifndef MIXEST_DENSITY_HPP
#define MIXEST_DENSITY_HPP

#include <vector>

#include "mixest/mixture.hpp"
#include "mixest/numerics.hpp"
#include "mixest/rng.hpp"

namespace mixest {

enum class DensityKind {
  Beta,
  TargetF1,
  TargetF2,
  LiftingUniform,
  LiftingArcsine,
  Mixture,
};

/// An evaluable density on [0,1] with declared breakpoints, pointwise bounds,
/// and an exact sampler. The bounds carry the constants used in the divergence
/// sandwich and curvature checks: inf_bound is a lower bound a >= 0 on the
/// density, sup_bound an upper bound c (infinite for the arcsine lifting).
class Density {
 public:
  static Density beta(ComponentParams theta);
  static Density f1();
  static Density f2();
  static Density uniform();
  static Density arcsine();
  static Density mixture(MixtureParams psi);

  DensityKind kind() const { return kind_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double sup_bound() const { return sup_bound_; }
  double inf_bound() const { return inf_bound_; }

  double operator()(double x) const;

  /// n i.i.d. draws using the handle's exact sampler.
  std::vector<double> sample(RngStream& rng, std::size_t n) const;

  const ComponentParams& beta_params() const;
  const MixtureParams& mixture_params() const;

  bool operator==(const Density&) const = default;

 private:
  Density() = default;
  DensityKind kind_ = DensityKind::LiftingUniform;
  ComponentParams theta_;
  MixtureParams psi_;
  std::vector<double> breakpoints_;
  double sup_bound_ = 1.0;
  double inf_bound_ = 0.0;
};

/// Convenience: draws n samples (spec-level free function).
std::vector<double> sample(const Density& density, RngStream& rng, std::size_t n);

/// Quadrature spec whose panels split at this density set's breakpoints.
QuadratureSpec merged_spec(const QuadratureSpec& base, std::initializer_list<const Density*> ds);

}  // namespace mixest

#endif
