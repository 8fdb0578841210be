#include "mixest/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "mixest/experiments.hpp"

namespace mixest {

namespace {

// Solve A x = b for a 5x5 system by Gaussian elimination with partial pivoting.
Params5 solve5(Matrix5 a, Params5 b) {
  constexpr int n = 5;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) {
      throw std::runtime_error("regression: singular linear system (degenerate design)");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  Params5 x{};
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

Matrix5 invert5(const Matrix5& a) {
  Matrix5 inv{};
  for (int col = 0; col < 5; ++col) {
    Params5 e{};
    e[col] = 1.0;
    const Params5 x = solve5(a, e);
    for (int r = 0; r < 5; ++r) inv[r][col] = x[r];
  }
  return inv;
}

double rss_at(const std::vector<RateRow>& rows, const Params5& beta) {
  double acc = 0.0;
  for (const auto& row : rows) {
    const double r = row.K - rate_model(row.k, row.n, beta);
    acc += r * r;
  }
  return acc;
}

void check_design(const std::vector<RateRow>& rows) {
  std::vector<double> ks, ns;
  for (const auto& r : rows) {
    if (r.k < 2.0) throw std::invalid_argument("regression: rows must have k >= 2");
    ks.push_back(r.k);
    ns.push_back(r.n);
  }
  auto distinct = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  };
  if (rows.size() < 5 || distinct(ks) < 2 || distinct(ns) < 2) {
    throw std::invalid_argument("regression: need >= 2 distinct k and n values");
  }
}

}  // namespace

double rate_model(double k, double n, const Params5& beta) {
  return beta[0] + beta[1] * std::pow(k + 2.0, -beta[3]) + beta[2] * std::pow(n, -beta[4]);
}

Params5 rate_jacobian_row(double k, double n, const Params5& beta) {
  const double pk = std::pow(k + 2.0, -beta[3]);
  const double pn = std::pow(n, -beta[4]);
  return {1.0, pk, pn, -beta[1] * std::log(k + 2.0) * pk, -beta[2] * std::log(n) * pn};
}

Params5 default_init(const std::vector<RateRow>& rows) {
  check_design(rows);
  // Linear least squares in (a0, a1, a2) at b1 = b2 = 1, via normal equations.
  double ata[3][3] = {};
  double atb[3] = {};
  for (const auto& r : rows) {
    const double x[3] = {1.0, 1.0 / (r.k + 2.0), 1.0 / r.n};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i][j] += x[i] * x[j];
      atb[i] += x[i] * r.K;
    }
  }
  // Embed in the 5x5 solver with identity rows for the fixed exponents.
  Matrix5 a{};
  Params5 b{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = ata[i][j];
    b[i] = atb[i];
  }
  a[3][3] = 1.0;
  a[4][4] = 1.0;
  b[3] = 1.0;
  b[4] = 1.0;
  Params5 init = solve5(a, b);
  init[3] = 1.0;
  init[4] = 1.0;
  return init;
}

RegressionFit fit_rate_model(const std::vector<RateRow>& rows, const Params5& init,
                             int max_iters, double tol) {
  check_design(rows);
  RegressionFit fit;
  fit.n_obs = rows.size();
  Params5 beta = init;
  double rss = rss_at(rows, beta);
  double lambda = 1e-3;

  for (int it = 0; it < max_iters; ++it) {
    fit.iterations = it + 1;
    Matrix5 h{};
    Params5 g{};
    for (const auto& row : rows) {
      const Params5 j = rate_jacobian_row(row.k, row.n, beta);
      const double r = row.K - rate_model(row.k, row.n, beta);
      for (int p = 0; p < 5; ++p) {
        g[p] += j[p] * r;
        for (int q = 0; q < 5; ++q) h[p][q] += j[p] * j[q];
      }
    }

    Matrix5 damped = h;
    for (int p = 0; p < 5; ++p) damped[p][p] += lambda * std::max(h[p][p], 1e-12);
    Params5 step;
    try {
      step = solve5(damped, g);
    } catch (const std::runtime_error&) {
      throw std::runtime_error("fit_rate_model: singular Jacobian (degenerate design)");
    }
    Params5 cand = beta;
    double rel_step = 0.0;
    for (int p = 0; p < 5; ++p) {
      cand[p] += step[p];
      rel_step = std::max(rel_step, std::abs(step[p]) / std::max(1.0, std::abs(beta[p])));
    }
    if (rel_step < 1e-11) {
      // The proposed update no longer moves the parameters: stationary point.
      fit.converged = true;
      break;
    }
    const double cand_rss = rss_at(rows, cand);

    if (std::isfinite(cand_rss) && cand_rss <= rss) {
      const double rel = (rss - cand_rss) / (rss + 1e-300);
      beta = cand;
      rss = cand_rss;
      lambda = std::max(lambda * 0.3, 1e-14);
      if (rel < tol) {
        fit.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }

  fit.params = beta;
  fit.rss = rss;
  if (fit.converged) {
    fit.covariance = sandwich_covariance(rows, fit);
    for (int p = 0; p < 5; ++p) {
      const double half = 1.96 * std::sqrt(std::max(fit.covariance[p][p], 0.0));
      fit.ci_lower[p] = fit.params[p] - half;
      fit.ci_upper[p] = fit.params[p] + half;
    }
  }
  return fit;
}

Matrix5 sandwich_covariance(const std::vector<RateRow>& rows, const RegressionFit& fit) {
  Matrix5 h{}, m{};
  for (const auto& row : rows) {
    const Params5 j = rate_jacobian_row(row.k, row.n, fit.params);
    const double r = row.K - rate_model(row.k, row.n, fit.params);
    for (int p = 0; p < 5; ++p) {
      for (int q = 0; q < 5; ++q) {
        h[p][q] += j[p] * j[q];
        m[p][q] += r * r * j[p] * j[q];
      }
    }
  }
  // Tiny relative ridge keeps the inverse defined when a Jacobian column
  // vanishes (e.g. a1 = 0 makes the b1 column identically zero).
  double h_scale = 0.0;
  for (int p = 0; p < 5; ++p) h_scale = std::max(h_scale, h[p][p]);
  for (int p = 0; p < 5; ++p) h[p][p] += 1e-14 * std::max(h_scale, 1.0);
  const Matrix5 hinv = invert5(h);
  Matrix5 tmp{}, cov{};
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      for (int s = 0; s < 5; ++s) tmp[p][q] += hinv[p][s] * m[s][q];
    }
  }
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      for (int s = 0; s < 5; ++s) cov[p][q] += tmp[p][s] * hinv[s][q];
    }
  }
  // Symmetrize against roundoff.
  for (int p = 0; p < 5; ++p) {
    for (int q = p + 1; q < 5; ++q) {
      const double v = 0.5 * (cov[p][q] + cov[q][p]);
      cov[p][q] = cov[q][p] = v;
    }
  }
  return cov;
}

std::vector<RateRow> rate_rows_from_results(const std::vector<ScenarioResult>& results,
                                            bool aggregate_means) {
  std::vector<RateRow> rows;
  if (!aggregate_means) {
    for (const auto& r : results) {
      if (r.k >= 2) rows.push_back({static_cast<double>(r.k), static_cast<double>(r.n), r.K});
    }
    return rows;
  }
  std::map<std::pair<int, std::size_t>, std::pair<double, int>> acc;
  for (const auto& r : results) {
    if (r.k < 2) continue;
    auto& [sum, count] = acc[{r.k, r.n}];
    sum += r.K;
    ++count;
  }
  for (const auto& [key, val] : acc) {
    rows.push_back({static_cast<double>(key.first), static_cast<double>(key.second),
                    val.first / val.second});
  }
  return rows;
}

std::string fit_report_csv(const RegressionFit& fit) {
  static const char* names[5] = {"a0", "a1", "a2", "b1", "b2"};
  char buf[256];
  std::string out = "param,estimate,ci_lower,ci_upper\n";
  for (int p = 0; p < 5; ++p) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", names[p], fit.params[p],
                  fit.ci_lower[p], fit.ci_upper[p]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "meta,rss=%.17g,n_obs=%zu,converged=%d\n", fit.rss, fit.n_obs,
                fit.converged ? 1 : 0);
  out += buf;
  return out;
}

}  // namespace mixest
