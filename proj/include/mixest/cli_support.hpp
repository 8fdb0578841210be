#ifndef MIXEST_CLI_SUPPORT_HPP
#define MIXEST_CLI_SUPPORT_HPP

#include <string>

#include "mixest/experiments.hpp"
#include "mixest/regression.hpp"

namespace mixest {

struct SpecParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Density spec grammar:
///   f1 | f2 | uniform | arcsine | beta:A,B | mix:K,PI...,A,B,...
/// The mix payload is the mixture CSV row grammar.
Density parse_density_spec(const std::string& spec);

/// Structured run configuration (JSON document, strict: unknown keys rejected).
/// Recognized keys and defaults are documented in the README and --help.
struct RunConfig {
  ExperimentPlan plan = ExperimentPlan::e2_desk();
  std::string out_dir = ".";
  int workers = 1;

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
};

/// (k x n) mean-K table as CSV: header `k\n...`, one row per k.
std::string means_table_csv(const std::vector<ScenarioResult>& rows);

/// Heatmap of mean K by (k, n) as a standalone SVG. One rectangle per cell,
/// colored by a linear ramp from the min to the max mean.
std::string means_heatmap_svg(const std::vector<ScenarioResult>& rows);

}  // namespace mixest

#endif
