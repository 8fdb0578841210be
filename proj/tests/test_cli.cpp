#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mixest/cli_support.hpp"

using namespace mixest;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MIXEST_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::vector<ScenarioResult> fake_results() {
  std::vector<ScenarioResult> rows;
  for (int k = 2; k <= 4; ++k) {
    for (std::size_t n : {100, 200}) {
      for (int l = 0; l < 2; ++l) {
        ScenarioResult r;
        r.k = k;
        r.n = n;
        r.l = l;
        r.K = -1.0 + 0.1 * k + 0.01 * l + 1.0 / static_cast<double>(n);
        rows.push_back(r);
      }
    }
  }
  return rows;
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("parse_density_spec accepts the documented grammar") {
  CHECK(parse_density_spec("f1")(0.2) == doctest::Approx(1.25));
  CHECK(parse_density_spec("f2")(0.0) == doctest::Approx(2.0));
  CHECK(parse_density_spec("uniform")(0.7) == doctest::Approx(1.0));
  CHECK(parse_density_spec("arcsine")(0.5) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
  CHECK(parse_density_spec("beta:2,5")(0.25) == doctest::Approx(beta_pdf(0.25, 2.0, 5.0)));
  const Density mix = parse_density_spec("mix:2,0.5,0.5,2,2,5,1");
  CHECK(mix(0.5) == doctest::Approx(0.5 * beta_pdf(0.5, 2.0, 2.0) + 0.5 * beta_pdf(0.5, 5.0, 1.0)));
}

TEST_CASE("parse_density_spec rejects malformed specs") {
  CHECK_THROWS_AS(parse_density_spec(""), SpecParseError);
  CHECK_THROWS_AS(parse_density_spec("f3"), SpecParseError);
  CHECK_THROWS_AS(parse_density_spec("beta:2"), SpecParseError);
  CHECK_THROWS_AS(parse_density_spec("beta:2,5,7"), SpecParseError);
  CHECK_THROWS_AS(parse_density_spec("beta:x,y"), SpecParseError);
  CHECK_THROWS_AS(parse_density_spec("mix:junk"), SpecParseError);
  CHECK_THROWS_AS(parse_density_spec("beta:"), SpecParseError);
}

TEST_CASE("RunConfig strict JSON parsing") {
  const char* ok = R"({
    "experiment": "E1",
    "n_values": [256, 512],
    "k_values": [2, 3],
    "replicates": 4,
    "master_seed": 99,
    "mm": {"max_iters": 100, "restarts": 2},
    "quadrature": {"points_per_panel": 32},
    "out_dir": "out",
    "workers": 3
  })";
  const RunConfig cfg = RunConfig::from_json_text(ok);
  CHECK(cfg.plan.experiment_id == "E1");
  CHECK(cfg.plan.n_values == std::vector<std::size_t>{256, 512});
  CHECK(cfg.plan.k_values == std::vector<int>{2, 3});
  CHECK(cfg.plan.replicates == 4);
  CHECK(cfg.plan.master_seed == 99);
  CHECK(cfg.plan.mm.max_iters == 100);
  CHECK(cfg.plan.mm.restarts == 2);
  CHECK(cfg.plan.mm.rel_tol == MMConfig{}.rel_tol);  // untouched default
  CHECK(cfg.plan.quad.points_per_panel == 32);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.workers == 3);

  // Minimal config falls back to defaults.
  const RunConfig min = RunConfig::from_json_text(R"({"experiment": "E2"})");
  CHECK(min.plan.experiment_id == "E2");
  CHECK(min.workers == 1);

  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"experiment": "E2", "typo_key": 1})"),
                  SpecParseError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"experiment": "E2", "mm": {"iters": 5}})"),
                  SpecParseError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"experiment": "E3"})"), SpecParseError);
  CHECK_THROWS_AS(RunConfig::from_json_text("not json"), SpecParseError);
}

TEST_CASE("means table and heatmap") {
  const auto rows = fake_results();
  const std::string table = means_table_csv(rows);
  CHECK(count_occurrences(table, "\n") == 4);  // header + one row per k
  CHECK(table.find("100") != std::string::npos);
  CHECK(table.find("200") != std::string::npos);

  const std::string svg = means_heatmap_svg(rows);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_occurrences(svg, "class=\"cell\"") == 6);  // 3 k values x 2 n values
}

TEST_CASE("cli binary: exit codes and artifacts") {
  const fs::path dir = fs::temp_directory_path() / "mixest_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  CHECK(run_cli("divergence f1 uniform uniform") == 0);
  CHECK(run_cli("divergence f1") != 0);                // missing required positional
  CHECK(run_cli("divergence f1 uniform nosuch") == 2); // bad density spec
  CHECK(run_cli("regress " + (dir / "missing.csv").string()) == 3);

  CHECK(run_cli("fit --gen f2 --n 300 --k 2 --seed 5 --restarts 2 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "mixture.csv"));
  CHECK(fs::exists(dir / "trace.txt"));

  // Experiment subcommand end to end on a tiny config, then report + regress.
  const fs::path cfg_path = dir / "cfg.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"experiment": "E2", "n_values": [150, 300], "k_values": [2, 3],
               "replicates": 2, "mm": {"restarts": 1, "max_iters": 100},
               "out_dir": ")" << dir.string() << R"("})";
  }
  CHECK(run_cli("experiment --config " + cfg_path.string()) == 0);
  const fs::path results = dir / "E2_results.csv";
  REQUIRE(fs::exists(results));
  CHECK(run_cli("report " + results.string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "means.csv"));
  CHECK(fs::exists(dir / "heatmap.svg"));
  // Regress on a synthetic results file whose K values follow the rate model
  // exactly, so the fit must converge and write its report.
  const fs::path synth = dir / "synth.csv";
  {
    std::ofstream out(synth);
    out << "experiment,k,n,l,seed,K,final_objective,iterations\n";
    const Params5 truth{-1.68, 0.73, 6.80, 1.87, 0.99};
    char buf[120];
    for (int k = 2; k <= 8; ++k) {
      for (std::size_t n : {1024, 2048, 4096, 8192}) {
        std::snprintf(buf, sizeof(buf), "E2,%d,%zu,0,0,%.17g,0,1\n", k, n,
                      rate_model(k, static_cast<double>(n), truth));
        out << buf;
      }
    }
  }
  CHECK(run_cli("regress " + synth.string() + " --means --out " + (dir / "fit.csv").string()) == 0);
  CHECK(fs::exists(dir / "fit.csv"));

  fs::remove_all(dir);
}
