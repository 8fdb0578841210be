#include "mixest/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace mixest {

namespace {

// t log(t/s) with the continuity convention t log t -> 0 as t -> 0.
double xlog_ratio(double t, double s) {
  if (t < 1e-300) return 0.0;
  return t * std::log(t / s);
}

}  // namespace

double klh(const Density& f, const Density& g, const Density& h, const QuadratureSpec& spec) {
  const QuadratureSpec merged = merged_spec(spec, {&f, &g, &h});
  const double value = integrate(
      [&](double x) {
        const double fh = f(x) + h(x);
        const double gh = g(x) + h(x);
        return xlog_ratio(fh, gh);
      },
      merged);
  if (value < 0.0 && value > -1e-10) return 0.0;  // quadrature roundoff
  return value;
}

double kl_quadrature(const std::function<double(double)>& p,
                     const std::function<double(double)>& q,
                     const QuadratureSpec& spec) {
  return integrate([&](double x) { return xlog_ratio(p(x), q(x)); }, spec);
}

double empirical_klh_objective(const MixtureParams& psi, const Density& h,
                               std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("empirical_klh_objective: xs and ys must be non-empty and equal length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double vx = mixture_pdf(xs[i], psi) + h(xs[i]);
    const double vy = mixture_pdf(ys[i], psi) + h(ys[i]);
    if (!(vx > 0.0) || !(vy > 0.0)) {
      throw std::runtime_error("empirical_klh_objective: mixture + h vanished at a sample point");
    }
    acc += std::log(vx) + std::log(vy);
  }
  return acc / static_cast<double>(xs.size());
}

double beta_kl_closed_form(double a_p, double b_p, double a_q, double b_q) {
  if (!(a_p > 0.0 && b_p > 0.0 && a_q > 0.0 && b_q > 0.0)) {
    throw std::domain_error("beta_kl_closed_form: all shapes must be positive");
  }
  const double log_beta_p = log_gamma(a_p) + log_gamma(b_p) - log_gamma(a_p + b_p);
  const double log_beta_q = log_gamma(a_q) + log_gamma(b_q) - log_gamma(a_q + b_q);
  const double psi_sum = digamma(a_p + b_p);
  return log_beta_q - log_beta_p + (a_p - a_q) * (digamma(a_p) - psi_sum) +
         (b_p - b_q) * (digamma(b_p) - psi_sum);
}

Distances distances(const Density& f, const Density& g, const QuadratureSpec& spec) {
  const QuadratureSpec merged = merged_spec(spec, {&f, &g});
  Distances d;
  d.l1 = integrate([&](double x) { return std::abs(f(x) - g(x)); }, merged);
  d.l2_sq = integrate([&](double x) { const double r = f(x) - g(x); return r * r; }, merged);
  d.tv = 0.5 * d.l1;
  return d;
}

DivergenceReport divergence_report(const Density& f, const Density& g, const Density& h,
                                   const QuadratureSpec& spec) {
  DivergenceReport r;
  r.klh = klh(f, g, h, spec);
  const Distances d = distances(f, g, spec);
  r.l1 = d.l1;
  r.l2_sq = d.l2_sq;
  r.tv = d.tv;
  return r;
}

double curvature_along_segment(const Density& p, const Density& q, const Density& h,
                               const Density& f, double pi, const QuadratureSpec& spec) {
  if (!(pi > 0.0 && pi < 1.0)) throw std::domain_error("curvature_along_segment: pi must be in (0,1)");
  const QuadratureSpec merged = merged_spec(spec, {&p, &q, &h, &f});
  return integrate(
      [&](double x) {
        const double pv = p(x);
        const double qv = q(x);
        const double mix = (1.0 - pi) * pv + pi * qv + h(x);
        const double diff = pv - qv;
        return (f(x) + h(x)) * diff * diff / (mix * mix);
      },
      merged);
}

}  // namespace mixest
