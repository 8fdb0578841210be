#ifndef MIXEST_EXPERIMENTS_HPP
#define MIXEST_EXPERIMENTS_HPP

#include <cstdint>
#include <string>

#include "mixest/estimation.hpp"

namespace mixest {

/// One E1/E2-style sweep: scenario grid over (k, n), r replicates each,
/// deterministically seeded from the master seed.
struct ExperimentPlan {
  std::string experiment_id = "E2";  // "E1" or "E2"
  Density target = Density::f2();
  Density lifting = Density::uniform();
  std::vector<std::size_t> n_values = {1024, 2048, 4096, 8192};
  std::vector<int> k_values = {2, 3, 4, 5, 6};
  int replicates = 10;
  std::uint64_t master_seed = 20240801;
  MMConfig mm;
  QuadratureSpec quad;

  void validate() const;

  static ExperimentPlan e1_desk();
  static ExperimentPlan e2_desk();
  static ExperimentPlan e1_paper();  // paper-scale grid (n to 2^15, k to 8, r = 50)
  static ExperimentPlan e2_paper();
};

struct ScenarioResult {
  int k = 0;
  std::size_t n = 0;
  int l = 0;
  std::uint64_t seed = 0;
  double K = 0.0;               // negative log h-lifted likelihood
  double final_objective = 0.0; // L_{h,n} at the fitted mixture
  int iterations = 0;
};

/// Runs one replicate: derives the stream from (master_seed, id, k, n, l),
/// samples, fits, and evaluates K by quadrature with all breakpoints merged.
ScenarioResult run_scenario(const ExperimentPlan& plan, int k, std::size_t n, int l);

/// The constant integral of (f+h) log(f+h); KL_h(f || fit) = constant + K.
double entropy_constant(const ExperimentPlan& plan);

/// Runs all triples with a worker pool. Completed rows are appended to
/// results_path as they finish; on return the file is rewritten sorted by
/// (k, n, l), so re-runs and different worker counts give identical bytes.
/// Existing rows for matching triples are reused (resume).
std::vector<ScenarioResult> run_plan(const ExperimentPlan& plan, int worker_count,
                                     const std::string& results_path);

std::vector<ScenarioResult> read_results_csv(const std::string& path);
std::string scenario_csv_row(const ScenarioResult& row);

}  // namespace mixest

#endif
