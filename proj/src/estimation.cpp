#include "mixest/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixest {

namespace {

constexpr double kWeightFloor = 1e-12;

double clamp_box(double v) { return std::clamp(v, kThetaMin, kThetaMax); }

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

// Cached per-sample quantities shared across MM iterations.
struct Workspace {
  std::size_t n = 0;
  std::vector<double> lx_x, l1x_x, h_x;  // ln x_i, ln(1-x_i), h(x_i)
  std::vector<double> lx_y, l1x_y, h_y;

  Workspace(const Density& h, std::span<const double> xs, std::span<const double> ys) {
    n = xs.size();
    auto fill = [&](std::span<const double> s, std::vector<double>& lx,
                    std::vector<double>& l1x, std::vector<double>& hv) {
      lx.resize(n);
      l1x.resize(n);
      hv.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        lx[i] = safe_log(s[i]);
        l1x[i] = safe_log(1.0 - s[i]);
        hv[i] = h(s[i]);
      }
    };
    fill(xs, lx_x, l1x_x, h_x);
    fill(ys, lx_y, l1x_y, h_y);
  }
};

// Component density values at all samples, via the cached logs.
void component_pdfs(const ComponentParams& th, const Workspace& ws, bool ys,
                    std::vector<double>& out) {
  const auto& lx = ys ? ws.lx_y : ws.lx_x;
  const auto& l1x = ys ? ws.l1x_y : ws.l1x_x;
  const double norm = log_gamma(th.a + th.b) - log_gamma(th.a) - log_gamma(th.b);
  out.resize(ws.n);
  for (std::size_t i = 0; i < ws.n; ++i) {
    out[i] = std::exp(norm + (th.a - 1.0) * lx[i] + (th.b - 1.0) * l1x[i]);
  }
}

// Weighted beta log-likelihood and its derivatives in (a, b):
//   W(a,b) = s_lx (a-1) + s_l1x (b-1) + mass * (lnG(a+b) - lnG(a) - lnG(b)).
struct WeightedBetaStats {
  double mass = 0.0;
  double s_lx = 0.0;
  double s_l1x = 0.0;

  double value(double a, double b) const {
    return s_lx * (a - 1.0) + s_l1x * (b - 1.0) +
           mass * (log_gamma(a + b) - log_gamma(a) - log_gamma(b));
  }
  std::pair<double, double> gradient(double a, double b) const {
    const double psi_ab = digamma(a + b);
    return {s_lx + mass * (psi_ab - digamma(a)), s_l1x + mass * (psi_ab - digamma(b))};
  }
};

bool at_box_stationary(double v, double g, double tol) {
  if (v <= kThetaMin && g < 0.0) return true;
  if (v >= kThetaMax && g > 0.0) return true;
  return std::abs(g) <= tol;
}

// Bisection on one gradient component with the other shape fixed.
double bisect_coordinate(const WeightedBetaStats& st, bool on_a, double other, int iters) {
  auto grad = [&](double v) {
    auto [ga, gb] = on_a ? st.gradient(v, other) : st.gradient(other, v);
    return on_a ? ga : gb;
  };
  double lo = kThetaMin, hi = kThetaMax;
  double glo = grad(lo), ghi = grad(hi);
  if (glo <= 0.0) return lo;  // concave in each coordinate: decreasing gradient
  if (ghi >= 0.0) return hi;
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (grad(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

ComponentParams maximize_weighted_beta(const WeightedBetaStats& st, ComponentParams theta,
                                       const MMConfig& cfg) {
  double a = clamp_box(theta.a), b = clamp_box(theta.b);
  double f = st.value(a, b);
  for (int it = 0; it < cfg.newton_max_iters; ++it) {
    auto [ga, gb] = st.gradient(a, b);
    if (at_box_stationary(a, ga, cfg.newton_tol) && at_box_stationary(b, gb, cfg.newton_tol)) break;

    const double psi1_ab = trigamma(a + b);
    const double haa = st.mass * (psi1_ab - trigamma(a));
    const double hbb = st.mass * (psi1_ab - trigamma(b));
    const double hab = st.mass * psi1_ab;
    const double det = haa * hbb - hab * hab;
    const double scale = std::max({std::abs(haa), std::abs(hbb), std::abs(hab)});

    double da, db;
    if (std::abs(det) > 1e-12 * scale * scale && scale > 0.0) {
      // Newton step: solve H d = -g.
      da = (-ga * hbb + gb * hab) / det;
      db = (-gb * haa + ga * hab) / det;
    } else {
      // Near-singular Hessian: coordinate bisection on the gradient.
      const double na = bisect_coordinate(st, true, b, 64);
      const double nb = bisect_coordinate(st, false, na, 64);
      da = na - a;
      db = nb - b;
    }

    // Damping: halve the step until the objective does not decrease.
    double t = 1.0;
    double best_a = a, best_b = b, best_f = f;
    for (int bt = 0; bt < 40; ++bt) {
      const double ca = clamp_box(a + t * da);
      const double cb = clamp_box(b + t * db);
      const double cf = st.value(ca, cb);
      if (cf >= f) {
        best_a = ca; best_b = cb; best_f = cf;
        break;
      }
      t *= 0.5;
    }
    if (best_a == a && best_b == b) break;  // no admissible step
    a = best_a; b = best_b; f = best_f;
  }
  return {a, b};
}

WeightedBetaStats column_stats(std::size_t j, const Responsibilities& r,
                               std::span<const double> xs, std::span<const double> ys) {
  WeightedBetaStats st;
  for (std::size_t i = 0; i < r.n; ++i) {
    const double wx = r.tau_x[i * r.k + j];
    const double wy = r.tau_y[i * r.k + j];
    st.mass += wx + wy;
    st.s_lx += wx * safe_log(xs[i]) + wy * safe_log(ys[i]);
    st.s_l1x += wx * safe_log(1.0 - xs[i]) + wy * safe_log(1.0 - ys[i]);
  }
  return st;
}

}  // namespace

void MMConfig::validate() const {
  if (max_iters < 1 || restarts < 1 || newton_max_iters < 1 || !(rel_tol > 0.0) ||
      !(newton_tol > 0.0)) {
    throw std::invalid_argument("MMConfig: all fields must be positive");
  }
}

Responsibilities responsibilities(const MixtureParams& psi, const Density& h,
                                  std::span<const double> xs, std::span<const double> ys) {
  psi.validate();
  if (xs.size() != ys.size()) throw std::invalid_argument("responsibilities: sample sizes differ");
  Responsibilities r;
  r.n = xs.size();
  r.k = psi.k();
  r.tau_x.resize(r.n * r.k);
  r.gamma_x.resize(r.n);
  r.tau_y.resize(r.n * r.k);
  r.gamma_y.resize(r.n);
  auto fill = [&](std::span<const double> s, std::vector<double>& tau, std::vector<double>& gamma) {
    for (std::size_t i = 0; i < r.n; ++i) {
      double denom = h(s[i]);
      for (std::size_t j = 0; j < r.k; ++j) {
        const double t = psi.weights[j] * beta_pdf(s[i], psi.components[j]);
        tau[i * r.k + j] = t;
        denom += t;
      }
      gamma[i] = h(s[i]) / denom;
      for (std::size_t j = 0; j < r.k; ++j) tau[i * r.k + j] /= denom;
    }
  };
  fill(xs, r.tau_x, r.gamma_x);
  fill(ys, r.tau_y, r.gamma_y);
  return r;
}

double minorizer_value(const MixtureParams& psi, const MixtureParams& chi, const Density& h,
                       std::span<const double> xs, std::span<const double> ys) {
  psi.validate();
  if (psi.k() != chi.k()) {
    throw std::invalid_argument("minorizer_value: psi and chi need the same component count");
  }
  const Responsibilities r = responsibilities(chi, h, xs, ys);
  auto xlogx = [](double t) { return t > 0.0 ? t * std::log(t) : 0.0; };
  double acc = 0.0;
  auto add_side = [&](std::span<const double> s, const std::vector<double>& tau,
                      const std::vector<double>& gamma) {
    for (std::size_t i = 0; i < r.n; ++i) {
      for (std::size_t j = 0; j < r.k; ++j) {
        const double t = tau[i * r.k + j];
        if (t > 0.0) {
          acc += t * std::log(psi.weights[j]) + t * beta_log_pdf(s[i], psi.components[j].a, psi.components[j].b);
        }
        acc -= xlogx(t);
      }
      acc += gamma[i] * safe_log(h(s[i]));
      acc -= xlogx(gamma[i]);
    }
  };
  add_side(xs, r.tau_x, r.gamma_x);
  add_side(ys, r.tau_y, r.gamma_y);
  return acc / static_cast<double>(r.n);
}

std::vector<double> update_weights(const Responsibilities& r) {
  std::vector<double> sums(r.k, 0.0);
  for (std::size_t i = 0; i < r.n; ++i) {
    for (std::size_t j = 0; j < r.k; ++j) {
      sums[j] += r.tau_x[i * r.k + j] + r.tau_y[i * r.k + j];
    }
  }
  double total = 0.0;
  for (double s : sums) total += s;
  if (!(total > 0.0)) {
    throw std::runtime_error("update_weights: degenerate responsibilities (all mass on h)");
  }
  for (double& s : sums) s /= total;
  return sums;
}

ComponentParams update_component(std::size_t j, const Responsibilities& r,
                                 std::span<const double> xs, std::span<const double> ys,
                                 ComponentParams theta_init, const MMConfig& cfg,
                                 bool* degenerate) {
  cfg.validate();
  if (j >= r.k) throw std::out_of_range("update_component: component index out of range");
  const WeightedBetaStats st = column_stats(j, r, xs, ys);
  if (degenerate) *degenerate = false;
  if (st.mass < kWeightFloor) {
    if (degenerate) *degenerate = true;
    return theta_init;
  }
  return maximize_weighted_beta(st, theta_init, cfg);
}

namespace {

// One restart of the MM loop, using the cached workspace for speed.
FitResult mm_single(const Density& h, std::span<const double> xs, std::span<const double> ys,
                    std::size_t k, const MMConfig& cfg, const Workspace& ws,
                    MixtureParams psi) {
  const std::size_t n = ws.n;
  std::vector<std::vector<double>> pdf_x(k), pdf_y(k);
  std::vector<double> denom_x(n), denom_y(n);
  std::vector<WeightedBetaStats> stats(k);

  auto objective = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::log(denom_x[i]) + std::log(denom_y[i]);
    return acc / static_cast<double>(n);
  };

  auto refresh = [&]() {
    for (std::size_t j = 0; j < k; ++j) {
      component_pdfs(psi.components[j], ws, false, pdf_x[j]);
      component_pdfs(psi.components[j], ws, true, pdf_y[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double dx = ws.h_x[i], dy = ws.h_y[i];
      for (std::size_t j = 0; j < k; ++j) {
        dx += psi.weights[j] * pdf_x[j][i];
        dy += psi.weights[j] * pdf_y[j][i];
      }
      denom_x[i] = dx;
      denom_y[i] = dy;
    }
  };

  FitResult res;
  refresh();
  double prev = objective();
  res.objective_trace.push_back(prev);

  for (int s = 0; s < cfg.max_iters; ++s) {
    // Responsibilities and the separated updates in one pass.
    std::vector<double> wsum(k, 0.0);
    for (auto& st : stats) st = {};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double tx = psi.weights[j] * pdf_x[j][i] / denom_x[i];
        const double ty = psi.weights[j] * pdf_y[j][i] / denom_y[i];
        wsum[j] += tx + ty;
        stats[j].mass += tx + ty;
        stats[j].s_lx += tx * ws.lx_x[i] + ty * ws.lx_y[i];
        stats[j].s_l1x += tx * ws.l1x_x[i] + ty * ws.l1x_y[i];
      }
    }
    double total = 0.0;
    for (double w : wsum) total += w;
    if (!(total > 0.0)) {
      throw std::runtime_error("mm_fit: degenerate responsibilities (all mass on h)");
    }
    for (std::size_t j = 0; j < k; ++j) {
      psi.weights[j] = wsum[j] / total;
      if (stats[j].mass >= kWeightFloor) {
        psi.components[j] = maximize_weighted_beta(stats[j], psi.components[j], cfg);
      }
    }

    refresh();
    const double cur = objective();
    res.objective_trace.push_back(cur);
    res.iterations = s + 1;
    if (std::abs(cur - prev) < cfg.rel_tol * (std::abs(prev) + 1.0)) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  res.objective = prev;
  res.psi = std::move(psi);
  res.psi.weights = renormalize_weights(res.psi.weights);
  return res;
}

// Quantile-spread initialization: component j's mean near the (j-1/2)/k
// quantile of the pooled sample, concentration a+b = 4, perturbed per restart.
// The perturbation width is itself drawn per restart so that successive
// restarts explore basins well away from the plain quantile placement.
MixtureParams initialize(std::span<const double> xs, std::span<const double> ys, std::size_t k,
                         RngStream& rng) {
  std::vector<double> pool(xs.begin(), xs.end());
  pool.insert(pool.end(), ys.begin(), ys.end());
  std::sort(pool.begin(), pool.end());
  MixtureParams psi;
  psi.weights.assign(k, 1.0 / static_cast<double>(k));
  const double spread = 0.05 + 0.85 * rng.uniform();
  for (std::size_t j = 0; j < k; ++j) {
    const double q = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
    const auto idx = static_cast<std::size_t>(q * (static_cast<double>(pool.size()) - 1.0));
    double m = pool[idx] + spread * (rng.uniform() - 0.5);
    m = std::clamp(m, 0.05, 0.95);
    psi.components.push_back({clamp_box(4.0 * m), clamp_box(4.0 * (1.0 - m))});
  }
  return psi;
}

}  // namespace

FitResult mm_fit(const Density& h, std::span<const double> xs, std::span<const double> ys,
                 std::size_t k, const MMConfig& cfg, RngStream& rng) {
  cfg.validate();
  if (k < 1) throw std::invalid_argument("mm_fit: k must be >= 1");
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("mm_fit: xs and ys must be non-empty and equal length");
  }
  const Workspace ws(h, xs, ys);

  FitResult best;
  bool have_best = false;
  std::string first_error;
  for (int r = 0; r < cfg.restarts; ++r) {
    RngStream stream = rng.child(static_cast<std::uint64_t>(r));
    try {
      FitResult fit = mm_single(h, xs, ys, k, cfg, ws, initialize(xs, ys, k, stream));
      fit.restart_index = r;
      if (!have_best || fit.objective > best.objective) {
        best = std::move(fit);
        have_best = true;
      }
    } catch (const std::exception& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!have_best) {
    throw std::runtime_error("mm_fit: every restart failed: " + first_error);
  }
  return best;
}

double stationarity_sup_norm(const MixtureParams& psi, const Density& h,
                             std::span<const double> xs, std::span<const double> ys,
                             double fd_step) {
  psi.validate();
  const std::size_t k = psi.k();
  // Unconstrained coordinates: softmax logits for weights, log-shifted shapes.
  std::vector<double> t;
  for (double w : psi.weights) t.push_back(std::log(std::max(w, 1e-12)));
  for (const auto& c : psi.components) {
    t.push_back(std::log(std::max(c.a - kThetaMin, 1e-12)));
    t.push_back(std::log(std::max(c.b - kThetaMin, 1e-12)));
  }
  auto unpack = [&](const std::vector<double>& v) {
    MixtureParams out;
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(v[j]);
    for (std::size_t j = 0; j < k; ++j) out.weights.push_back(std::exp(v[j]) / z);
    for (std::size_t j = 0; j < k; ++j) {
      out.components.push_back({std::min(kThetaMin + std::exp(v[k + 2 * j]), kThetaMax),
                                std::min(kThetaMin + std::exp(v[k + 2 * j + 1]), kThetaMax)});
    }
    return out;
  };
  double sup = 0.0;
  for (std::size_t d = 0; d < t.size(); ++d) {
    std::vector<double> plus = t, minus = t;
    plus[d] += fd_step;
    minus[d] -= fd_step;
    const double g = (empirical_klh_objective(unpack(plus), h, xs, ys) -
                      empirical_klh_objective(unpack(minus), h, xs, ys)) /
                     (2.0 * fd_step);
    sup = std::max(sup, std::abs(g));
  }
  return sup;
}

void GreedyGrid::validate() const {
  if (pi_values.empty() || thetas.empty()) throw std::invalid_argument("GreedyGrid: empty grid");
  for (double p : pi_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("GreedyGrid: pi values must be in [0,1]");
  }
  for (const auto& th : thetas) th.validate();
}

GreedyGrid GreedyGrid::defaults() {
  GreedyGrid g;
  for (int i = 0; i <= 100; ++i) g.pi_values.push_back(i / 100.0);
  const int m = 25;
  const double lo = std::log(kThetaMin), hi = std::log(kThetaMax);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      g.thetas.push_back({std::exp(lo + (hi - lo) * i / (m - 1.0)),
                          std::exp(lo + (hi - lo) * j / (m - 1.0))});
    }
  }
  return g;
}

GreedyObjective population_kappa(Density f, Density h, QuadratureSpec spec) {
  return [f = std::move(f), h = std::move(h), spec = std::move(spec)](const MixtureParams& psi) {
    return klh(f, Density::mixture(psi), h, spec);
  };
}

GreedyObjective empirical_kappa(std::vector<double> xs, std::vector<double> ys, Density h) {
  return [xs = std::move(xs), ys = std::move(ys), h = std::move(h)](const MixtureParams& psi) {
    return -empirical_klh_objective(psi, h, xs, ys);
  };
}

namespace {

bool theta_less(const ComponentParams& a, const ComponentParams& b) {
  return a.a != b.a ? a.a < b.a : a.b < b.b;
}

}  // namespace

std::vector<GreedyStep> greedy_fit(const GreedyObjective& kappa, std::size_t k_max,
                                   const GreedyGrid& grid) {
  grid.validate();
  std::vector<GreedyStep> steps;

  // f_bar_0: best single grid component, ties broken lexicographically.
  GreedyStep init;
  bool first = true;
  for (const auto& th : grid.thetas) {
    MixtureParams cand{{1.0}, {th}};
    const double v = kappa(cand);
    if (first || v < init.objective ||
        (v == init.objective && theta_less(th, init.theta_chosen))) {
      init.psi = std::move(cand);
      init.objective = v;
      init.pi_chosen = 1.0;
      init.theta_chosen = th;
      first = false;
    }
  }
  steps.push_back(init);

  for (std::size_t step = 1; step <= k_max; ++step) {
    const MixtureParams& base = steps.back().psi;
    GreedyStep best;
    bool have = false;
    for (double pi : grid.pi_values) {
      for (const auto& th : grid.thetas) {
        MixtureParams cand = base;
        for (double& w : cand.weights) w *= 1.0 - pi;
        cand.weights.push_back(pi);
        cand.components.push_back(th);
        cand.weights = renormalize_weights(cand.weights);
        const double v = kappa(cand);
        const bool wins = !have || v < best.objective ||
                          (v == best.objective &&
                           (pi < best.pi_chosen ||
                            (pi == best.pi_chosen && theta_less(th, best.theta_chosen))));
        if (wins) {
          best.psi = std::move(cand);
          best.objective = v;
          best.pi_chosen = pi;
          best.theta_chosen = th;
          have = true;
        }
      }
    }
    steps.push_back(std::move(best));
  }
  return steps;
}

}  // namespace mixest
