#ifndef MIXEST_ESTIMATION_HPP
#define MIXEST_ESTIMATION_HPP

#include <functional>
#include <span>

#include "mixest/divergence.hpp"

namespace mixest {

/// Per-sample posterior shares of each component (tau) and of the lifting
/// density (gamma) in the lifted mixture. Row-major n x k for tau.
struct Responsibilities {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> tau_x;    // n*k
  std::vector<double> gamma_x;  // n
  std::vector<double> tau_y;    // n*k
  std::vector<double> gamma_y;  // n
};

struct MMConfig {
  int max_iters = 500;
  double rel_tol = 1e-8;
  int restarts = 5;
  int newton_max_iters = 50;
  double newton_tol = 1e-10;

  void validate() const;
};

struct FitResult {
  MixtureParams psi;
  double objective = 0.0;               // final L_{h,n}
  std::vector<double> objective_trace;  // non-decreasing along iterations
  int iterations = 0;
  int restart_index = 0;
};

Responsibilities responsibilities(const MixtureParams& psi, const Density& h,
                                  std::span<const double> xs, std::span<const double> ys);

/// Jensen's-inequality minorizer Q_n(psi, chi); Q_n(psi,psi) = L_{h,n}(psi)
/// and Q_n(psi,chi) <= L_{h,n}(psi), with 0 log 0 := 0.
double minorizer_value(const MixtureParams& psi, const MixtureParams& chi, const Density& h,
                       std::span<const double> xs, std::span<const double> ys);

std::vector<double> update_weights(const Responsibilities& r);

/// Maximizes the responsibility-weighted beta log-likelihood for component j
/// over the Theta box by projected damped Newton (digamma/trigamma), with a
/// bisection fallback when the Hessian is near-singular. If the column's
/// weight mass is below 1e-12 the initial value is returned and *degenerate
/// (when provided) is set.
ComponentParams update_component(std::size_t j, const Responsibilities& r,
                                 std::span<const double> xs, std::span<const double> ys,
                                 ComponentParams theta_init, const MMConfig& cfg,
                                 bool* degenerate = nullptr);

/// MM algorithm for the h-MLLE: cfg.restarts independent initializations,
/// best final objective wins (ties to the lowest restart index).
FitResult mm_fit(const Density& h, std::span<const double> xs, std::span<const double> ys,
                 std::size_t k, const MMConfig& cfg, RngStream& rng);

/// Sup-norm of the central finite-difference gradient of L_{h,n} in
/// unconstrained coordinates (softmax weights, log-shifted shapes).
double stationarity_sup_norm(const MixtureParams& psi, const Density& h,
                             std::span<const double> xs, std::span<const double> ys,
                             double fd_step = 1e-5);

/// Finite candidate sets for the greedy inner minimization.
struct GreedyGrid {
  std::vector<double> pi_values;           // must contain 0 for monotonicity
  std::vector<ComponentParams> thetas;

  void validate() const;
  static GreedyGrid defaults();
};

/// Objective over structured mixtures: population KL_h with fixed (f, h), or
/// an empirical equivalent (differing from kappa_n by a constant).
using GreedyObjective = std::function<double(const MixtureParams&)>;

GreedyObjective population_kappa(Density f, Density h, QuadratureSpec spec);
GreedyObjective empirical_kappa(std::vector<double> xs, std::vector<double> ys, Density h);

struct GreedyStep {
  MixtureParams psi;
  double objective = 0.0;
  double pi_chosen = 0.0;
  ComponentParams theta_chosen;
};

/// Greedy approximation sequence: at each step exhaustively minimizes kappa
/// over the (pi, theta) grid (ties: smallest pi, then lexicographic theta)
/// and mixes the winner into the running density. Entry 0 is the best single
/// grid component; entries 1..k_max are the greedy steps.
std::vector<GreedyStep> greedy_fit(const GreedyObjective& kappa, std::size_t k_max,
                                   const GreedyGrid& grid);

}  // namespace mixest

#endif
