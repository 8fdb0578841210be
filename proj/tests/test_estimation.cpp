#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mixest/estimation.hpp"

using namespace mixest;

namespace {

MixtureParams random_psi(RngStream& rng, std::size_t k) {
  MixtureParams psi;
  for (std::size_t j = 0; j < k; ++j) {
    psi.weights.push_back(0.05 + rng.uniform());
    psi.components.push_back({1.0 + 15.0 * rng.uniform(), 1.0 + 15.0 * rng.uniform()});
  }
  psi.weights = renormalize_weights(psi.weights);
  return psi;
}

// Independent weighted beta log-likelihood, for grid-search oracles.
double weighted_loglik(double a, double b, const std::vector<double>& zs,
                       const std::vector<double>& ws) {
  double acc = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    acc += ws[i] * ((a - 1.0) * std::log(zs[i]) + (b - 1.0) * std::log(1.0 - zs[i]));
    mass += ws[i];
  }
  return acc + mass * (log_gamma(a + b) - log_gamma(a) - log_gamma(b));
}

}  // namespace

TEST_CASE("responsibilities: uniform component against uniform lifting") {
  const MixtureParams psi{{1.0}, {{1.0, 1.0}}};
  const Density h = Density::uniform();
  RngStream rng(5);
  const auto xs = h.sample(rng, 50);
  const auto ys = h.sample(rng, 50);
  const Responsibilities r = responsibilities(psi, h, xs, ys);
  for (std::size_t i = 0; i < r.n; ++i) {
    CHECK(r.tau_x[i] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.gamma_x[i] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("responsibilities: rows sum to one for any inputs") {
  RngStream rng(6);
  for (const Density& h : {Density::uniform(), Density::arcsine()}) {
    const MixtureParams psi = random_psi(rng, 3);
    auto xs = Density::f2().sample(rng, 200);
    auto ys = h.sample(rng, 200);
    // Keep arcsine draws off the exact endpoints where h is infinite.
    for (auto* s : {&xs, &ys}) {
      for (double& v : *s) v = std::clamp(v, 1e-12, 1.0 - 1e-12);
    }
    const Responsibilities r = responsibilities(psi, h, xs, ys);
    for (std::size_t i = 0; i < r.n; ++i) {
      double row_x = r.gamma_x[i], row_y = r.gamma_y[i];
      for (std::size_t j = 0; j < r.k; ++j) {
        row_x += r.tau_x[i * r.k + j];
        row_y += r.tau_y[i * r.k + j];
        CHECK(r.tau_x[i * r.k + j] >= 0.0);
        CHECK(r.tau_x[i * r.k + j] <= 1.0);
      }
      CHECK(row_x == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row_y == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("minorizer touches the objective at chi = psi and lies below elsewhere") {
  RngStream rng(8);
  const Density h = Density::uniform();
  const auto xs = Density::f2().sample(rng, 300);
  const auto ys = h.sample(rng, 300);
  for (int trial = 0; trial < 100; ++trial) {
    const MixtureParams psi = random_psi(rng, 2);
    const MixtureParams chi = random_psi(rng, 2);
    const double objective = empirical_klh_objective(psi, h, xs, ys);
    CHECK(minorizer_value(psi, psi, h, xs, ys) == doctest::Approx(objective).epsilon(1e-10));
    CHECK(minorizer_value(psi, chi, h, xs, ys) <= objective + 1e-10);
  }
}

TEST_CASE("update_weights") {
  RngStream rng(9);
  const Density h = Density::uniform();
  const auto xs = h.sample(rng, 100);
  const auto ys = h.sample(rng, 100);

  // Identical uniform components: all tau entries equal, weights come back uniform.
  const MixtureParams psi{{0.7, 0.3}, {{1.0, 1.0}, {1.0, 1.0}}};
  SUBCASE("equal responsibilities give uniform weights") {
    Responsibilities r = responsibilities(psi, h, xs, ys);
    for (double& t : r.tau_x) t = 0.25;
    for (double& t : r.tau_y) t = 0.25;
    const auto w = update_weights(r);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("k = 1 returns the point mass") {
    const auto w = update_weights(responsibilities({{1.0}, {{2.0, 2.0}}}, h, xs, ys));
    REQUIRE(w.size() == 1);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("output always sums to 1") {
    const auto w = update_weights(responsibilities(psi, h, xs, ys));
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("degenerate responsibilities throw") {
    Responsibilities r = responsibilities(psi, h, xs, ys);
    std::fill(r.tau_x.begin(), r.tau_x.end(), 0.0);
    std::fill(r.tau_y.begin(), r.tau_y.end(), 0.0);
    CHECK_THROWS_AS(update_weights(r), std::runtime_error);
  }
}

TEST_CASE("update_component recovers Beta(2,2) and matches a grid-search oracle") {
  RngStream rng(10);
  std::vector<double> zs;
  for (int i = 0; i < 10000; ++i) zs.push_back(sample_beta(2.0, 2.0, rng));
  const auto ys = Density::uniform().sample(rng, zs.size());

  // Equal-weight single component setup: tau_x = 1 on column 0, tau_y = 0.
  Responsibilities r;
  r.n = zs.size();
  r.k = 1;
  r.tau_x.assign(r.n, 1.0);
  r.gamma_x.assign(r.n, 0.0);
  r.tau_y.assign(r.n, 0.0);
  r.gamma_y.assign(r.n, 1.0);

  const ComponentParams fitted = update_component(0, r, zs, ys, {2.5, 2.5}, {});
  CHECK(std::abs(fitted.a - 2.0) < 0.2);
  CHECK(std::abs(fitted.b - 2.0) < 0.2);

  // Coarse grid oracle over [1,5]^2.
  const std::vector<double> ones(zs.size(), 1.0);
  double best = -INFINITY, best_a = 0.0, best_b = 0.0;
  for (double a = 1.0; a <= 5.0; a += 0.05) {
    for (double b = 1.0; b <= 5.0; b += 0.05) {
      const double v = weighted_loglik(a, b, zs, ones);
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  CHECK(std::abs(fitted.a - best_a) < 0.06);
  CHECK(std::abs(fitted.b - best_b) < 0.06);
  CHECK(weighted_loglik(fitted.a, fitted.b, zs, ones) >= best - 1e-9);
}

TEST_CASE("update_component: interior stationarity and mirror symmetry") {
  RngStream rng(11);
  std::vector<double> zs;
  for (int i = 0; i < 5000; ++i) zs.push_back(sample_beta(3.0, 2.0, rng));
  const std::vector<double> ys(zs.size(), 0.5);

  Responsibilities r;
  r.n = zs.size();
  r.k = 1;
  r.tau_x.assign(r.n, 1.0);
  r.gamma_x.assign(r.n, 0.0);
  r.tau_y.assign(r.n, 0.0);
  r.gamma_y.assign(r.n, 1.0);

  const ComponentParams th = update_component(0, r, zs, ys, {2.0, 2.0}, {});
  // Gradient of the weighted log-likelihood at the returned interior point.
  double s_lx = 0.0, s_l1x = 0.0;
  for (double z : zs) {
    s_lx += std::log(z);
    s_l1x += std::log(1.0 - z);
  }
  const double mass = static_cast<double>(zs.size());
  const double ga = s_lx + mass * (digamma(th.a + th.b) - digamma(th.a));
  const double gb = s_l1x + mass * (digamma(th.a + th.b) - digamma(th.b));
  CHECK(std::abs(ga / mass) <= 1e-10);
  CHECK(std::abs(gb / mass) <= 1e-10);

  // Mirroring the data swaps the shapes.
  std::vector<double> mirrored;
  for (double z : zs) mirrored.push_back(1.0 - z);
  const ComponentParams sw = update_component(0, r, mirrored, ys, {2.0, 2.0}, {});
  CHECK(sw.a == doctest::Approx(th.b).epsilon(1e-8));
  CHECK(sw.b == doctest::Approx(th.a).epsilon(1e-8));
}

TEST_CASE("update_component returns the initial value on an empty column") {
  Responsibilities r;
  r.n = 4;
  r.k = 2;
  r.tau_x.assign(8, 0.0);
  r.tau_y.assign(8, 0.0);
  r.gamma_x.assign(4, 1.0);
  r.gamma_y.assign(4, 1.0);
  const std::vector<double> zs{0.1, 0.2, 0.3, 0.4};
  bool degenerate = false;
  const ComponentParams th = update_component(1, r, zs, zs, {3.0, 4.0}, {}, &degenerate);
  CHECK(degenerate);
  CHECK((th == ComponentParams{3.0, 4.0}));
}

TEST_CASE("mm_fit recovers a single Beta(3,3) component") {
  RngStream data_rng(12);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(sample_beta(3.0, 3.0, data_rng));
  const Density h = Density::uniform();
  const auto ys = h.sample(data_rng, xs.size());

  RngStream fit_rng(13);
  const FitResult fit = mm_fit(h, xs, ys, 1, {}, fit_rng);
  CHECK(std::abs(fit.psi.components[0].a - 3.0) < 0.3);
  CHECK(std::abs(fit.psi.components[0].b - 3.0) < 0.3);

  // Grid oracle on the empirical objective itself.
  double best = -INFINITY, best_a = 0.0, best_b = 0.0;
  for (double a = 1.0; a <= 6.0; a += 0.1) {
    for (double b = 1.0; b <= 6.0; b += 0.1) {
      const double v = empirical_klh_objective({{1.0}, {{a, b}}}, h, xs, ys);
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  CHECK(std::abs(fit.psi.components[0].a - best_a) < 0.15);
  CHECK(std::abs(fit.psi.components[0].b - best_b) < 0.15);
  CHECK(fit.objective >= best - 1e-9);
}

TEST_CASE("mm_fit: monotone trace, determinism, sample-order invariance") {
  RngStream data_rng(14);
  const Density h = Density::uniform();
  auto xs = Density::f1().sample(data_rng, 1500);
  auto ys = h.sample(data_rng, 1500);

  RngStream fit_rng(15);
  const FitResult fit = mm_fit(h, xs, ys, 3, {}, fit_rng);
  for (std::size_t s = 1; s < fit.objective_trace.size(); ++s) {
    CHECK(fit.objective_trace[s] >= fit.objective_trace[s - 1] - 1e-9);
  }
  CHECK(fit.objective == doctest::Approx(empirical_klh_objective(fit.psi, h, xs, ys)).epsilon(1e-9));

  RngStream fit_rng2(15);
  const FitResult again = mm_fit(h, xs, ys, 3, {}, fit_rng2);
  CHECK(again.objective == fit.objective);
  CHECK(again.psi == fit.psi);

  // Permuting both samples leaves the final objective essentially unchanged
  // (the objective is a symmetric average; initialization is quantile-based).
  std::reverse(xs.begin(), xs.end());
  std::reverse(ys.begin(), ys.end());
  RngStream fit_rng3(15);
  const FitResult perm = mm_fit(h, xs, ys, 3, {}, fit_rng3);
  CHECK(perm.objective == doctest::Approx(fit.objective).epsilon(1e-9));
}

TEST_CASE("mm sandwich chain holds along iterates") {
  RngStream rng(16);
  const Density h = Density::uniform();
  const auto xs = Density::f2().sample(rng, 400);
  const auto ys = h.sample(rng, 400);

  MixtureParams chi = random_psi(rng, 2);
  for (int s = 0; s < 5; ++s) {
    const Responsibilities r = responsibilities(chi, h, xs, ys);
    MixtureParams next;
    next.weights = update_weights(r);
    for (std::size_t j = 0; j < 2; ++j) {
      next.components.push_back(update_component(j, r, xs, ys, chi.components[j], {}));
    }
    const double l_prev = empirical_klh_objective(chi, h, xs, ys);
    const double q_prev = minorizer_value(chi, chi, h, xs, ys);
    const double q_next = minorizer_value(next, chi, h, xs, ys);
    const double l_next = empirical_klh_objective(next, h, xs, ys);
    CHECK(l_prev == doctest::Approx(q_prev).epsilon(1e-10));
    CHECK(q_next >= q_prev - 1e-9);
    CHECK(l_next >= q_next - 1e-9);
    chi = next;
  }
}

TEST_CASE("stationarity at a tight MM fixed point") {
  RngStream data_rng(18);
  std::vector<double> xs;
  for (int i = 0; i < 4000; ++i) xs.push_back(sample_beta(3.0, 5.0, data_rng));
  const Density h = Density::uniform();
  const auto ys = h.sample(data_rng, xs.size());

  MMConfig cfg;
  cfg.rel_tol = 1e-14;
  cfg.max_iters = 5000;
  RngStream fit_rng(19);
  const FitResult fit = mm_fit(h, xs, ys, 1, cfg, fit_rng);
  CHECK(stationarity_sup_norm(fit.psi, h, xs, ys) <= 1e-5);
}

TEST_CASE("greedy: flat when the grid holds only the optimum") {
  const Density f = Density::mixture({{1.0}, {{3.0, 3.0}}});
  const Density h = Density::uniform();
  GreedyGrid grid;
  grid.pi_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  grid.thetas = {{3.0, 3.0}};
  const auto steps = greedy_fit(population_kappa(f, h, {}), 4, grid);
  for (const auto& s : steps) {
    CHECK(std::abs(s.objective) < 1e-9);
  }
  CHECK_THROWS_AS(greedy_fit(population_kappa(f, h, {}), 2, GreedyGrid{}), std::invalid_argument);
}

TEST_CASE("greedy: monotone objectives and the 4c^2/(a^2(k+2)) bound") {
  const Density f = Density::f2();
  const Density h = Density::uniform();
  GreedyGrid grid;
  for (int i = 0; i <= 50; ++i) grid.pi_values.push_back(i / 50.0);
  grid.thetas = {{1.0, 3.0}, {3.0, 1.0}, {2.0, 2.0}};

  double c = 0.0;
  for (const auto& th : grid.thetas) c = std::max(c, beta_sup(th.a, th.b));
  const double a = h.inf_bound();

  RngStream rng(20);
  const auto xs = f.sample(rng, 2000);
  const auto ys = h.sample(rng, 2000);

  const std::vector<std::pair<const char*, GreedyObjective>> objectives = {
      {"population", population_kappa(f, h, {})},
      {"empirical", empirical_kappa(xs, ys, h)},
  };

  for (const auto& [name, kappa] : objectives) {
    CAPTURE(name);
    // Brute-forced hull minimum over dense weight combinations of the grid.
    double hull_min = INFINITY;
    const int steps_w = 50;
    for (int i = 0; i <= steps_w; ++i) {
      for (int j = 0; j + i <= steps_w; ++j) {
        const double w1 = static_cast<double>(i) / steps_w;
        const double w2 = static_cast<double>(j) / steps_w;
        const double w3 = std::max(0.0, 1.0 - w1 - w2);
        MixtureParams psi{{w1, w2, w3}, {grid.thetas[0], grid.thetas[1], grid.thetas[2]}};
        psi.weights = renormalize_weights({w1 + 1e-300, w2, w3});
        hull_min = std::min(hull_min, kappa(psi));
      }
    }

    const auto seq = greedy_fit(kappa, 6, grid);
    for (std::size_t k = 1; k < seq.size(); ++k) {
      CHECK(seq[k].objective <= seq[k - 1].objective + 1e-12);
      CHECK(seq[k].objective - hull_min <= 4.0 * c * c / (a * a * (k + 2.0)) + 1e-9);
    }
  }
}
