#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixest/density.hpp"

using namespace mixest;

TEST_CASE("mixture_pdf point values") {
  CHECK(mixture_pdf(0.3, {{1.0}, {{1.0, 1.0}}}) == doctest::Approx(1.0));
  CHECK(mixture_pdf(0.5, {{0.5, 0.5}, {{2.0, 2.0}, {2.0, 2.0}}}) == doctest::Approx(1.5));
  CHECK(mixture_pdf(0.5, {{0.3, 0.7}, {{1.0, 1.0}, {2.0, 2.0}}}) ==
        doctest::Approx(0.3 * 1.0 + 0.7 * 1.5).epsilon(1e-13));
}

TEST_CASE("renormalize_weights") {
  CHECK(renormalize_weights({2.0, 2.0}) == std::vector<double>{0.5, 0.5});
  CHECK(renormalize_weights({1.0}) == std::vector<double>{1.0});
  const auto w = renormalize_weights({0.1, 0.3, 0.6});
  CHECK(std::abs(w[0] - 0.1) < 1e-15);
  CHECK(std::abs(w[1] - 0.3) < 1e-15);
  CHECK(std::abs(w[2] - 0.6) < 1e-15);
  CHECK_THROWS_AS(renormalize_weights({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(renormalize_weights({-1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("validation") {
  CHECK_NOTHROW(MixtureParams({{0.25, 0.75}, {{2.0, 2.0}, {3.0, 4.0}}}).validate());
  CHECK_THROWS_AS(MixtureParams({{0.5, 0.6}, {{2.0, 2.0}, {3.0, 4.0}}}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixtureParams({{1.0}, {{0.2, 2.0}}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(MixtureParams{}.validate(), std::invalid_argument);
}

TEST_CASE("random mixtures integrate to 1") {
  RngStream rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    MixtureParams psi;
    for (std::size_t j = 0; j < k; ++j) {
      psi.weights.push_back(0.05 + rng.uniform());
      psi.components.push_back({1.0 + 49.0 * rng.uniform(), 1.0 + 49.0 * rng.uniform()});
    }
    psi.weights = renormalize_weights(psi.weights);
    const Density d = Density::mixture(psi);
    const QuadratureSpec spec = merged_spec({}, {&d});
    const double mass = integrate([&](double x) { return mixture_pdf(x, psi); }, spec);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("permutation invariance and pointwise bound") {
  const MixtureParams psi{{0.2, 0.3, 0.5}, {{2.0, 3.0}, {5.0, 1.0}, {1.0, 4.0}}};
  const MixtureParams perm{{0.5, 0.2, 0.3}, {{1.0, 4.0}, {2.0, 3.0}, {5.0, 1.0}}};
  double bound = 0.0;
  for (const auto& c : psi.components) bound = std::max(bound, beta_sup(c.a, c.b));
  for (int i = 0; i <= 500; ++i) {
    const double x = i / 500.0;
    CHECK(mixture_pdf(x, psi) == doctest::Approx(mixture_pdf(x, perm)).epsilon(1e-14));
    CHECK(mixture_pdf(x, psi) <= bound + 1e-12);
  }
}

TEST_CASE("csv row round trip") {
  const MixtureParams psi{{0.125, 0.875}, {{2.25, 3.5}, {1.0, 49.0}}};
  const auto row = mixture_to_csv_row(psi);
  CHECK(row.substr(0, 2) == "2,");
  CHECK(mixture_from_csv_row(row) == psi);

  RngStream rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    MixtureParams p;
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    for (std::size_t j = 0; j < k; ++j) {
      p.weights.push_back(rng.uniform() + 0.01);
      p.components.push_back({1.0 + 49.0 * rng.uniform(), 1.0 + 49.0 * rng.uniform()});
    }
    p.weights = renormalize_weights(p.weights);
    CHECK(mixture_from_csv_row(mixture_to_csv_row(p)) == p);
  }
}

TEST_CASE("csv row rejects malformed input") {
  CHECK_THROWS_AS(mixture_from_csv_row(""), std::invalid_argument);
  CHECK_THROWS_AS(mixture_from_csv_row("2,0.5,0.5,2,2"), std::invalid_argument);
  CHECK_THROWS_AS(mixture_from_csv_row("1,1.0,2.0,x"), std::invalid_argument);
}
