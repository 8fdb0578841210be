#ifndef MIXEST_REGRESSION_HPP
#define MIXEST_REGRESSION_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace mixest {

/// One observation for the rate regression: a (k, n) scenario's K value.
struct RateRow {
  double k = 0.0;
  double n = 0.0;
  double K = 0.0;
};

using Params5 = std::array<double, 5>;        // (a0, a1, a2, b1, b2)
using Matrix5 = std::array<std::array<double, 5>, 5>;

struct RegressionFit {
  Params5 params{};
  Matrix5 covariance{};     // sandwich estimate
  Params5 ci_lower{};
  Params5 ci_upper{};
  double rss = 0.0;
  std::size_t n_obs = 0;
  bool converged = false;
  int iterations = 0;
};

/// E[K] = a0 + a1/(k+2)^b1 + a2/n^b2.
double rate_model(double k, double n, const Params5& beta);

/// Analytic gradient of the model in the five parameters.
Params5 rate_jacobian_row(double k, double n, const Params5& beta);

/// Default start: a0 = min K, b1 = b2 = 1, then (a0, a1, a2) by linear least
/// squares at those exponents (the model is linear given the exponents).
Params5 default_init(const std::vector<RateRow>& rows);

/// Levenberg-Marquardt least squares for the rate model. Fills the sandwich
/// covariance and 95% confidence intervals on convergence.
RegressionFit fit_rate_model(const std::vector<RateRow>& rows, const Params5& init,
                             int max_iters = 2000, double tol = 1e-12);

/// Misspecification-robust covariance H^-1 M H^-1 with H = sum J_i' J_i and
/// M = sum r_i^2 J_i' J_i at the fitted parameters.
Matrix5 sandwich_covariance(const std::vector<RateRow>& rows, const RegressionFit& fit);

/// Results-CSV adapter: keeps rows with k >= 2 (the regression excludes k=1),
/// optionally aggregating replicates to per-(k,n) means.
std::vector<RateRow> rate_rows_from_results(const std::vector<struct ScenarioResult>& results,
                                            bool aggregate_means = false);

/// Fit report CSV: `param,estimate,ci_lower,ci_upper` rows plus a metadata row.
std::string fit_report_csv(const RegressionFit& fit);

}  // namespace mixest

#endif
