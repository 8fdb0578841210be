#include "mixest/densities.hpp"

#include <cmath>
#include <stdexcept>

#include "mixest/numerics.hpp"

namespace mixest {

void ComponentParams::validate() const {
  if (!(a >= kThetaMin && a <= kThetaMax && b >= kThetaMin && b <= kThetaMax)) {
    throw std::invalid_argument("ComponentParams: shapes must lie in the Theta box [" +
                                std::to_string(kThetaMin) + ", " + std::to_string(kThetaMax) + "]");
  }
}

double beta_pdf(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("beta_pdf: shapes must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("beta_pdf: x must be in [0,1]");
  if (x == 0.0) {
    if (a > 1.0) return 0.0;
    if (a == 1.0) return b;  // limit b*(1-x)^{b-1} at 0
    return INFINITY;
  }
  if (x == 1.0) {
    if (b > 1.0) return 0.0;
    if (b == 1.0) return a;
    return INFINITY;
  }
  const double log_norm = log_gamma(a + b) - log_gamma(a) - log_gamma(b);
  return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

double beta_log_pdf(double x, double a, double b) {
  const double v = beta_pdf(x, a, b);
  return v > 0.0 ? std::log(v) : -INFINITY;
}

double beta_sup(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("beta_sup: shapes must be positive");
  if (a < 1.0 || b < 1.0) return INFINITY;
  if (a == 1.0 && b == 1.0) return 1.0;
  if (a == 1.0) return b;          // decreasing, sup at 0
  if (b == 1.0) return a;          // increasing, sup at 1
  const double mode = (a - 1.0) / (a + b - 2.0);
  return beta_pdf(mode, a, b);
}

double target_f1(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("target_f1: x must be in [0,1]");
  return (x <= 0.4 || x >= 0.6) ? 1.25 : 0.0;
}

double target_f2(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("target_f2: x must be in [0,1]");
  return x <= 0.5 ? 2.0 - 4.0 * x : -2.0 + 4.0 * x;
}

double arcsine_pdf(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("arcsine_pdf: x must be in [0,1]");
  if (x == 0.0 || x == 1.0) return INFINITY;
  return 1.0 / (M_PI * std::sqrt(x * (1.0 - x)));
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = sample_gamma(shape + 1.0, rng);
    double u;
    do { u = rng.uniform(); } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double a, double b, RngStream& rng) {
  const double x = sample_gamma(a, rng);
  const double y = sample_gamma(b, rng);
  return x / (x + y);
}

}  // namespace mixest
