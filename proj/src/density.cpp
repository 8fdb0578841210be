#include "mixest/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixest {

Density Density::beta(ComponentParams theta) {
  theta.validate();
  Density d;
  d.kind_ = DensityKind::Beta;
  d.theta_ = theta;
  d.sup_bound_ = beta_sup(theta.a, theta.b);
  d.inf_bound_ = 0.0;
  if (theta.a == 1.0 && theta.b == 1.0) d.inf_bound_ = 1.0;
  return d;
}

Density Density::f1() {
  Density d;
  d.kind_ = DensityKind::TargetF1;
  d.breakpoints_ = {0.4, 0.6};
  d.sup_bound_ = 1.25;
  return d;
}

Density Density::f2() {
  Density d;
  d.kind_ = DensityKind::TargetF2;
  d.breakpoints_ = {0.5};
  d.sup_bound_ = 2.0;
  return d;
}

Density Density::uniform() {
  Density d;
  d.kind_ = DensityKind::LiftingUniform;
  d.sup_bound_ = 1.0;
  d.inf_bound_ = 1.0;
  return d;
}

Density Density::arcsine() {
  Density d;
  d.kind_ = DensityKind::LiftingArcsine;
  d.sup_bound_ = INFINITY;
  d.inf_bound_ = 2.0 / M_PI;  // minimum at x = 1/2
  return d;
}

Density Density::mixture(MixtureParams psi) {
  psi.validate();
  Density d;
  d.kind_ = DensityKind::Mixture;
  d.sup_bound_ = 0.0;
  for (const auto& c : psi.components) {
    d.sup_bound_ = std::max(d.sup_bound_, beta_sup(c.a, c.b));
  }
  d.psi_ = std::move(psi);
  return d;
}

double Density::operator()(double x) const {
  switch (kind_) {
    case DensityKind::Beta: return beta_pdf(x, theta_);
    case DensityKind::TargetF1: return target_f1(x);
    case DensityKind::TargetF2: return target_f2(x);
    case DensityKind::LiftingUniform: return 1.0;
    case DensityKind::LiftingArcsine: return arcsine_pdf(x);
    case DensityKind::Mixture: return mixture_pdf(x, psi_);
  }
  throw std::logic_error("Density: unknown kind");
}

std::vector<double> Density::sample(RngStream& rng, std::size_t n) const {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0;
    switch (kind_) {
      case DensityKind::Beta:
        x = sample_beta(theta_.a, theta_.b, rng);
        break;
      case DensityKind::TargetF1: {
        // Equal-probability intervals, uniform within.
        const bool left = rng.uniform() < 0.5;
        const double u = rng.uniform();
        x = left ? 0.4 * u : 0.6 + 0.4 * u;
        break;
      }
      case DensityKind::TargetF2: {
        // Inverse CDF of the V-shaped density.
        const double u = rng.uniform();
        x = u <= 0.5 ? 0.5 * (1.0 - std::sqrt(1.0 - 2.0 * u))
                     : 1.0 - 0.5 * (1.0 - std::sqrt(2.0 * u - 1.0));
        break;
      }
      case DensityKind::LiftingUniform:
        x = rng.uniform();
        break;
      case DensityKind::LiftingArcsine: {
        const double s = std::sin(0.5 * M_PI * rng.uniform());
        x = s * s;
        break;
      }
      case DensityKind::Mixture: {
        double u = rng.uniform();
        std::size_t j = 0;
        for (; j + 1 < psi_.weights.size(); ++j) {
          if (u < psi_.weights[j]) break;
          u -= psi_.weights[j];
        }
        x = sample_beta(psi_.components[j].a, psi_.components[j].b, rng);
        break;
      }
    }
    out.push_back(x);
  }
  return out;
}

const ComponentParams& Density::beta_params() const {
  if (kind_ != DensityKind::Beta) throw std::logic_error("Density: not a beta handle");
  return theta_;
}

const MixtureParams& Density::mixture_params() const {
  if (kind_ != DensityKind::Mixture) throw std::logic_error("Density: not a mixture handle");
  return psi_;
}

std::vector<double> sample(const Density& density, RngStream& rng, std::size_t n) {
  return density.sample(rng, n);
}

QuadratureSpec merged_spec(const QuadratureSpec& base, std::initializer_list<const Density*> ds) {
  std::vector<double> extra = {0.25, 0.5, 0.75};
  for (const Density* d : ds) {
    extra.insert(extra.end(), d->breakpoints().begin(), d->breakpoints().end());
  }
  // Geometric panel grading toward the endpoints. This resolves integrable
  // x^{-1/2}-type singularities (arcsine lifting) as well as the unbounded
  // endpoint derivatives of beta densities with shapes just above 1.
  for (double b = 0.1; b > 1e-10; b *= 0.1) {
    extra.push_back(b);
    extra.push_back(1.0 - b);
  }
  return base.with_breakpoints(extra);
}

}  // namespace mixest
