#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mixest/cli_support.hpp"

namespace fs = std::filesystem;
using namespace mixest;

namespace {

constexpr int kExitParseError = 2;
constexpr int kExitNumericError = 3;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int run_divergence(const std::string& f_spec, const std::string& g_spec, const std::string& h_spec,
                   int points) {
  const Density f = parse_density_spec(f_spec);
  const Density g = parse_density_spec(g_spec);
  const Density h = parse_density_spec(h_spec);
  QuadratureSpec spec;
  spec.points_per_panel = points;
  const DivergenceReport r = divergence_report(f, g, h, spec);
  std::printf("klh    %.12g\n", r.klh);
  std::printf("l1     %.12g\n", r.l1);
  std::printf("l2_sq  %.12g\n", r.l2_sq);
  std::printf("tv     %.12g\n", r.tv);
  return 0;
}

std::vector<double> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open data file " + path);
  std::vector<double> xs;
  double v;
  while (in >> v) xs.push_back(v);
  if (xs.empty()) throw std::invalid_argument("data file " + path + " holds no samples");
  return xs;
}

int run_fit(const std::string& data_path, const std::string& gen_spec, std::size_t n,
            std::size_t k, const std::string& h_spec, std::uint64_t seed, const MMConfig& mm,
            const std::string& out_dir) {
  const Density h = parse_density_spec(h_spec);
  RngStream stream(derive_seed(seed, "fit"));
  std::vector<double> xs;
  if (!data_path.empty()) {
    xs = load_samples(data_path);
  } else {
    xs = parse_density_spec(gen_spec).sample(stream, n);
  }
  const std::vector<double> ys = h.sample(stream, xs.size());

  const FitResult fit = mm_fit(h, xs, ys, k, mm, stream);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "mixture.csv", mixture_to_csv_row(fit.psi) + "\n");
  std::string trace;
  char buf[40];
  for (double v : fit.objective_trace) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    trace += buf;
  }
  write_file(fs::path(out_dir) / "trace.txt", trace);
  std::printf("final_objective %.12g\n", fit.objective);
  std::printf("iterations %d\n", fit.iterations);
  std::printf("mixture %s\n", mixture_to_csv_row(fit.psi).c_str());
  return 0;
}

int run_greedy(const std::string& target_spec, const std::string& h_spec, std::size_t k_max,
               const std::string& out_dir) {
  const Density f = parse_density_spec(target_spec);
  const Density h = parse_density_spec(h_spec);
  const auto steps = greedy_fit(population_kappa(f, h, {}), k_max, GreedyGrid::defaults());
  fs::create_directories(out_dir);
  std::string out = "step,objective,mixture\n";
  char buf[64];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,", i, steps[i].objective);
    out += buf;
    out += "\"" + mixture_to_csv_row(steps[i].psi) + "\"\n";
  }
  write_file(fs::path(out_dir) / "greedy.csv", out);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::printf("step %zu objective %.12g\n", i, steps[i].objective);
  }
  return 0;
}

int run_experiment(const std::string& config_path, const std::string& out_dir_flag,
                   std::uint64_t seed, bool seed_given, int workers_flag) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = RunConfig::from_json_file(config_path);
  if (!out_dir_flag.empty()) cfg.out_dir = out_dir_flag;
  if (seed_given) cfg.plan.master_seed = seed;
  if (workers_flag > 0) cfg.workers = workers_flag;
  fs::create_directories(cfg.out_dir);
  const fs::path results = fs::path(cfg.out_dir) / (cfg.plan.experiment_id + "_results.csv");
  const auto rows = run_plan(cfg.plan, cfg.workers, results.string());
  std::printf("wrote %zu rows to %s\n", rows.size(), results.c_str());
  return 0;
}

int run_regress(const std::string& results_path, const std::string& out_path, bool aggregate) {
  const auto results = read_results_csv(results_path);
  if (results.empty()) throw std::invalid_argument("no rows in " + results_path);
  const auto rows = rate_rows_from_results(results, aggregate);
  const RegressionFit fit = fit_rate_model(rows, default_init(rows));
  const std::string report = fit_report_csv(fit);
  if (!out_path.empty()) write_file(out_path, report);
  std::fputs(report.c_str(), stdout);
  if (!fit.converged) {
    std::fprintf(stderr, "regress: did not converge in %d iterations\n", fit.iterations);
    return kExitNumericError;
  }
  return 0;
}

int run_report(const std::string& results_path, const std::string& out_dir) {
  const auto results = read_results_csv(results_path);
  if (results.empty()) throw std::invalid_argument("no rows in " + results_path);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "means.csv", means_table_csv(results));
  write_file(fs::path(out_dir) / "heatmap.svg", means_heatmap_svg(results));
  std::printf("wrote means.csv and heatmap.svg to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite mixture density estimation with the h-lifted likelihood"};
  app.require_subcommand(1);

  // divergence
  std::string f_spec, g_spec, h_spec = "uniform";
  int points = 64;
  auto* div = app.add_subcommand("divergence", "Divergence report between two densities");
  div->add_option("f", f_spec, "Density spec (f1|f2|uniform|arcsine|beta:A,B|mix:...)")->required();
  div->add_option("g", g_spec, "Density spec")->required();
  div->add_option("lifting", h_spec, "Lifting density spec (default uniform)");
  div->add_option("--points", points, "Gauss-Legendre points per panel (default 64)");

  // fit
  std::string data_path, gen_spec = "f2", fit_h = "uniform", fit_out = "fit_out";
  std::size_t fit_n = 1000, fit_k = 2;
  std::uint64_t fit_seed = 1;
  MMConfig mm;
  auto* fit = app.add_subcommand("fit", "Fit a k-component mixture by the MM algorithm");
  fit->add_option("--data", data_path, "Whitespace-separated sample file (overrides --gen)");
  fit->add_option("--gen", gen_spec, "Generator density spec (default f2)");
  fit->add_option("--n", fit_n, "Sample count when generating (default 1000)");
  fit->add_option("--k", fit_k, "Component count (default 2)");
  fit->add_option("--lifting", fit_h, "Lifting density spec (default uniform)");
  fit->add_option("--seed", fit_seed, "Master seed (default 1)");
  fit->add_option("--restarts", mm.restarts, "MM restarts (default 5)");
  fit->add_option("--max-iters", mm.max_iters, "MM iteration cap (default 500)");
  fit->add_option("--rel-tol", mm.rel_tol, "Objective stop tolerance (default 1e-8)");
  fit->add_option("--out", fit_out, "Output directory (default fit_out)");

  // greedy
  std::string greedy_target = "f2", greedy_h = "uniform", greedy_out = "greedy_out";
  std::size_t greedy_kmax = 6;
  auto* greedy = app.add_subcommand("greedy", "Greedy approximation sequence over a grid");
  greedy->add_option("--target", greedy_target, "Target density spec (default f2)");
  greedy->add_option("--lifting", greedy_h, "Lifting density spec (default uniform)");
  greedy->add_option("--kmax", greedy_kmax, "Number of greedy steps (default 6)");
  greedy->add_option("--out", greedy_out, "Output directory (default greedy_out)");

  // experiment
  std::string exp_config, exp_out;
  std::uint64_t exp_seed = 0;
  int exp_workers = 0;
  auto* exp = app.add_subcommand("experiment", "Run an E1/E2 scenario sweep");
  exp->add_option("--config", exp_config, "JSON config file (strict keys; defaults = desk-scale E2)");
  exp->add_option("--out", exp_out, "Output directory (default from config, else '.')");
  auto* seed_opt = exp->add_option("--seed", exp_seed, "Master seed (64-bit unsigned decimal)");
  exp->add_option("--workers", exp_workers, "Worker threads (default from config, else 1)");

  // regress
  std::string reg_results, reg_out;
  bool reg_aggregate = false;
  auto* reg = app.add_subcommand("regress", "Fit the rate model to a results CSV");
  reg->add_option("results", reg_results, "Results CSV from `experiment`")->required();
  reg->add_option("--out", reg_out, "Fit report CSV path (default: print only)");
  reg->add_flag("--means", reg_aggregate, "Aggregate replicates to per-(k,n) means before fitting");

  // report
  std::string rep_results, rep_out = "report_out";
  auto* rep = app.add_subcommand("report", "Means table and heatmap SVG from a results CSV");
  rep->add_option("results", rep_results, "Results CSV from `experiment`")->required();
  rep->add_option("--out", rep_out, "Output directory (default report_out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (div->parsed()) return run_divergence(f_spec, g_spec, h_spec, points);
    if (fit->parsed()) return run_fit(data_path, gen_spec, fit_n, fit_k, fit_h, fit_seed, mm, fit_out);
    if (greedy->parsed()) return run_greedy(greedy_target, greedy_h, greedy_kmax, greedy_out);
    if (exp->parsed()) return run_experiment(exp_config, exp_out, exp_seed, seed_opt->count() > 0, exp_workers);
    if (reg->parsed()) return run_regress(reg_results, reg_out, reg_aggregate);
    if (rep->parsed()) return run_report(rep_results, rep_out);
  } catch (const SpecParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParseError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParseError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericError;
  }
  return 0;
}
