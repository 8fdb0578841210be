#include "mixest/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mixest {

void ExperimentPlan::validate() const {
  if (experiment_id != "E1" && experiment_id != "E2") {
    throw std::invalid_argument("ExperimentPlan: experiment_id must be E1 or E2");
  }
  if (n_values.empty() || !std::is_sorted(n_values.begin(), n_values.end()) ||
      std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end()) {
    throw std::invalid_argument("ExperimentPlan: n_values must be non-empty and strictly increasing");
  }
  if (n_values.front() == 0) throw std::invalid_argument("ExperimentPlan: n_values must be positive");
  if (k_values.empty() || !std::is_sorted(k_values.begin(), k_values.end()) ||
      std::adjacent_find(k_values.begin(), k_values.end()) != k_values.end()) {
    throw std::invalid_argument("ExperimentPlan: k_values must be non-empty and strictly increasing");
  }
  if (replicates < 1) throw std::invalid_argument("ExperimentPlan: replicates must be >= 1");
  mm.validate();
  quad.validate();
}

ExperimentPlan ExperimentPlan::e1_desk() {
  ExperimentPlan p;
  p.experiment_id = "E1";
  p.target = Density::f1();
  p.lifting = Density::arcsine();
  p.mm.restarts = 20;
  return p;
}

ExperimentPlan ExperimentPlan::e2_desk() {
  ExperimentPlan p;
  // The desk grids average only r = 10 replicates per cell, so each fit gets
  // extra restarts to keep local-optimum noise out of the (k, n) means.
  p.mm.restarts = 20;
  return p;
}

ExperimentPlan ExperimentPlan::e1_paper() {
  ExperimentPlan p = e1_desk();
  p.n_values = {1024, 2048, 4096, 8192, 16384, 32768};
  p.k_values = {2, 3, 4, 5, 6, 7, 8};
  p.replicates = 50;
  return p;
}

ExperimentPlan ExperimentPlan::e2_paper() {
  ExperimentPlan p = e2_desk();
  p.n_values = {1024, 2048, 4096, 8192, 16384, 32768};
  p.k_values = {2, 3, 4, 5, 6, 7, 8};
  p.replicates = 50;
  return p;
}

ScenarioResult run_scenario(const ExperimentPlan& plan, int k, std::size_t n, int l) {
  plan.validate();
  if (std::find(plan.k_values.begin(), plan.k_values.end(), k) == plan.k_values.end() ||
      std::find(plan.n_values.begin(), plan.n_values.end(), n) == plan.n_values.end() ||
      l < 0 || l >= plan.replicates) {
    throw std::invalid_argument("run_scenario: (k, n, l) outside the plan ranges");
  }
  try {
    const std::uint64_t seed = derive_seed(plan.master_seed, plan.experiment_id,
                                           static_cast<std::uint64_t>(k), n,
                                           static_cast<std::uint64_t>(l));
    RngStream stream(seed);
    const std::vector<double> xs = plan.target.sample(stream, n);
    const std::vector<double> ys = plan.lifting.sample(stream, n);
    FitResult fit = mm_fit(plan.lifting, xs, ys, static_cast<std::size_t>(k), plan.mm, stream);

    const Density fitted = Density::mixture(fit.psi);
    const QuadratureSpec spec = merged_spec(plan.quad, {&plan.target, &plan.lifting, &fitted});
    const double K = -integrate(
        [&](double x) {
          return (plan.target(x) + plan.lifting(x)) * std::log(fitted(x) + plan.lifting(x));
        },
        spec);

    ScenarioResult row;
    row.k = k;
    row.n = n;
    row.l = l;
    row.seed = seed;
    row.K = K;
    row.final_objective = fit.objective;
    row.iterations = fit.iterations;
    return row;
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario (" + plan.experiment_id + ", k=" + std::to_string(k) +
                             ", n=" + std::to_string(n) + ", l=" + std::to_string(l) +
                             "): " + e.what());
  }
}

double entropy_constant(const ExperimentPlan& plan) {
  const QuadratureSpec spec = merged_spec(plan.quad, {&plan.target, &plan.lifting});
  return integrate(
      [&](double x) {
        const double t = plan.target(x) + plan.lifting(x);
        return t < 1e-300 ? 0.0 : t * std::log(t);
      },
      spec);
}

std::string scenario_csv_row(const ScenarioResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d,%zu,%d,%llu,%.17g,%.17g,%d", r.k, r.n, r.l,
                static_cast<unsigned long long>(r.seed), r.K, r.final_objective, r.iterations);
  return buf;
}

namespace {

std::string full_row(const std::string& experiment_id, const ScenarioResult& r) {
  return experiment_id + "," + scenario_csv_row(r);
}

constexpr const char* kHeader = "experiment,k,n,l,seed,K,final_objective,iterations";

}  // namespace

std::vector<ScenarioResult> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_results_csv: cannot open " + path);
  std::vector<ScenarioResult> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == kHeader) continue;
    }
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() != 8) continue;  // tolerate a truncated trailing row
    try {
      ScenarioResult r;
      r.k = std::stoi(fields[1]);
      r.n = static_cast<std::size_t>(std::stoull(fields[2]));
      r.l = std::stoi(fields[3]);
      r.seed = std::stoull(fields[4]);
      r.K = std::stod(fields[5]);
      r.final_objective = std::stod(fields[6]);
      r.iterations = std::stoi(fields[7]);
      rows.push_back(r);
    } catch (const std::exception&) {
      continue;
    }
  }
  return rows;
}

std::vector<ScenarioResult> run_plan(const ExperimentPlan& plan, int worker_count,
                                     const std::string& results_path) {
  plan.validate();
  if (worker_count < 1) throw std::invalid_argument("run_plan: worker_count must be >= 1");

  struct Triple {
    int k;
    std::size_t n;
    int l;
  };
  std::vector<Triple> triples;
  for (int k : plan.k_values) {
    for (std::size_t n : plan.n_values) {
      for (int l = 0; l < plan.replicates; ++l) triples.push_back({k, n, l});
    }
  }

  // Resume: reuse rows whose (k, n, l) matches a plan triple.
  std::vector<ScenarioResult> done;
  std::vector<ScenarioResult> existing;
  if (std::filesystem::exists(results_path)) existing = read_results_csv(results_path);
  for (const auto& r : existing) {
    const bool in_plan = std::any_of(triples.begin(), triples.end(), [&](const Triple& t) {
      return t.k == r.k && t.n == r.n && t.l == r.l;
    });
    if (in_plan) done.push_back(r);
  }
  auto is_done = [&](const Triple& t) {
    return std::any_of(done.begin(), done.end(), [&](const ScenarioResult& r) {
      return t.k == r.k && t.n == r.n && t.l == r.l;
    });
  };
  std::vector<Triple> todo;
  for (const auto& t : triples) {
    if (!is_done(t)) todo.push_back(t);
  }

  std::vector<ScenarioResult> fresh(todo.size());
  std::vector<std::string> errors;
  std::atomic<std::size_t> next{0};
  std::mutex io_mu;
  std::ofstream append(results_path, std::ios::app);
  if (done.empty()) {
    append << kHeader << "\n";
    append.flush();
  }

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      try {
        const ScenarioResult r = run_scenario(plan, todo[i].k, todo[i].n, todo[i].l);
        fresh[i] = r;
        std::lock_guard<std::mutex> lock(io_mu);
        append << full_row(plan.experiment_id, r) << "\n";
        append.flush();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mu);
        errors.emplace_back(e.what());
        fresh[i].k = -1;  // mark failed
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < worker_count; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  append.close();

  std::vector<ScenarioResult> all = std::move(done);
  for (const auto& r : fresh) {
    if (r.k >= 0 && r.n > 0) all.push_back(r);
  }
  std::sort(all.begin(), all.end(), [](const ScenarioResult& a, const ScenarioResult& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.n != b.n) return a.n < b.n;
    return a.l < b.l;
  });

  // Order-normalized rewrite: identical bytes for any scheduling.
  {
    std::ofstream out(results_path, std::ios::trunc);
    out << kHeader << "\n";
    for (const auto& r : all) out << full_row(plan.experiment_id, r) << "\n";
  }
  // Companion metadata: the entropy constant turns K into KL_h.
  {
    std::ofstream meta(results_path + ".meta.csv", std::ios::trunc);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", entropy_constant(plan));
    meta << "experiment,master_seed,entropy_constant\n"
         << plan.experiment_id << "," << plan.master_seed << "," << buf << "\n";
  }

  if (!errors.empty()) {
    std::string msg = "run_plan: " + std::to_string(errors.size()) + " scenario(s) failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  return all;
}

}  // namespace mixest
