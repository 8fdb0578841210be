#include "mixest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace mixest {

namespace {

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(fn) + ": argument must be positive and finite");
  }
}

// Lanczos g = 7, n = 9 coefficients (Godfrey).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum B_{2n}/(2n x^{2n})
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
            inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
  return result;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double result = 0.0;
  while (x < 6.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2n}/x^{2n+1}
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += inv + 0.5 * inv2;
  result += inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 -
            inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0))))));
  return result;
}

void QuadratureSpec::validate() const {
  if (points_per_panel < 2) throw std::invalid_argument("QuadratureSpec: points_per_panel must be >= 2");
  if (!(edge_inset > 0.0) || edge_inset > 1e-6) {
    throw std::invalid_argument("QuadratureSpec: edge_inset must be in (0, 1e-6]");
  }
  double prev = 0.0;
  for (double b : breakpoints) {
    if (!(b > prev) || !(b < 1.0)) {
      throw std::invalid_argument("QuadratureSpec: breakpoints must be strictly increasing in (0,1)");
    }
    prev = b;
  }
}

QuadratureSpec QuadratureSpec::with_breakpoints(const std::vector<double>& extra) const {
  QuadratureSpec out = *this;
  out.breakpoints.insert(out.breakpoints.end(), extra.begin(), extra.end());
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(
      std::unique(out.breakpoints.begin(), out.breakpoints.end(),
                  [](double a, double b) { return std::abs(a - b) < 1e-14; }),
      out.breakpoints.end());
  std::erase_if(out.breakpoints, [](double b) { return !(b > 0.0 && b < 1.0); });
  return out;
}

const std::vector<std::pair<double, double>>& gauss_legendre(int points) {
  static std::mutex mu;
  static std::unordered_map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> nw(points);
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    nw[i] = {-x, w};
    nw[n - 1 - i] = {x, w};
  }
  return cache.emplace(points, std::move(nw)).first->second;
}

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  spec.validate();
  std::vector<double> edges;
  edges.reserve(spec.breakpoints.size() + 2);
  edges.push_back(0.0);
  edges.insert(edges.end(), spec.breakpoints.begin(), spec.breakpoints.end());
  edges.push_back(1.0);

  const auto& nw = gauss_legendre(spec.points_per_panel);
  double total = 0.0;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p];
    const double hi = edges[p + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double panel = 0.0;
    for (const auto& [node, weight] : nw) {
      // Full panel measure; evaluation points are clamped away from the
      // domain endpoints where integrands may diverge.
      const double x = std::clamp(mid + half * node, spec.edge_inset, 1.0 - spec.edge_inset);
      const double v = f(x);
      if (!std::isfinite(v)) {
        throw IntegrationError("integrate: non-finite integrand value at x = " + std::to_string(x));
      }
      panel += weight * v;
    }
    total += half * panel;
  }
  return total;
}

}  // namespace mixest
