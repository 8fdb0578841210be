#include "mixest/cli_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mixest {

Density parse_density_spec(const std::string& spec) {
  if (spec == "f1") return Density::f1();
  if (spec == "f2") return Density::f2();
  if (spec == "uniform") return Density::uniform();
  if (spec == "arcsine") return Density::arcsine();
  if (spec.rfind("beta:", 0) == 0) {
    const std::string payload = spec.substr(5);
    const auto comma = payload.find(',');
    if (comma == std::string::npos || payload.find(',', comma + 1) != std::string::npos) {
      throw SpecParseError("density spec: beta takes exactly two shapes, e.g. beta:2,5");
    }
    try {
      return Density::beta({std::stod(payload.substr(0, comma)), std::stod(payload.substr(comma + 1))});
    } catch (const std::exception& e) {
      throw SpecParseError(std::string("density spec: ") + e.what());
    }
  }
  if (spec.rfind("mix:", 0) == 0) {
    try {
      return Density::mixture(mixture_from_csv_row(spec.substr(4)));
    } catch (const std::exception& e) {
      throw SpecParseError(std::string("density spec: ") + e.what());
    }
  }
  throw SpecParseError("density spec: unknown spec '" + spec +
                       "' (expected f1, f2, uniform, arcsine, beta:A,B, or mix:...)");
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) {
      throw SpecParseError("config: unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecParseError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  reject_unknown_keys(doc,
                      {"experiment", "n_values", "k_values", "replicates", "master_seed", "mm",
                       "quadrature", "out_dir", "workers", "scale"},
                      "top level");

  if (doc.contains("scale")) {
    const std::string scale = doc["scale"].get<std::string>();
    const std::string id = doc.value("experiment", std::string("E2"));
    if (scale == "paper") {
      cfg.plan = id == "E1" ? ExperimentPlan::e1_paper() : ExperimentPlan::e2_paper();
    } else if (scale == "desk") {
      cfg.plan = id == "E1" ? ExperimentPlan::e1_desk() : ExperimentPlan::e2_desk();
    } else {
      throw SpecParseError("config: scale must be 'desk' or 'paper'");
    }
  } else if (doc.contains("experiment")) {
    const std::string id = doc["experiment"].get<std::string>();
    cfg.plan = id == "E1" ? ExperimentPlan::e1_desk() : ExperimentPlan::e2_desk();
    if (id != "E1" && id != "E2") throw SpecParseError("config: experiment must be E1 or E2");
  }

  if (doc.contains("n_values")) cfg.plan.n_values = doc["n_values"].get<std::vector<std::size_t>>();
  if (doc.contains("k_values")) cfg.plan.k_values = doc["k_values"].get<std::vector<int>>();
  if (doc.contains("replicates")) cfg.plan.replicates = doc["replicates"].get<int>();
  if (doc.contains("master_seed")) cfg.plan.master_seed = doc["master_seed"].get<std::uint64_t>();
  if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
  if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();

  if (doc.contains("mm")) {
    const json& mm = doc["mm"];
    reject_unknown_keys(mm, {"max_iters", "rel_tol", "restarts", "newton_max_iters", "newton_tol"},
                        "mm");
    if (mm.contains("max_iters")) cfg.plan.mm.max_iters = mm["max_iters"].get<int>();
    if (mm.contains("rel_tol")) cfg.plan.mm.rel_tol = mm["rel_tol"].get<double>();
    if (mm.contains("restarts")) cfg.plan.mm.restarts = mm["restarts"].get<int>();
    if (mm.contains("newton_max_iters")) cfg.plan.mm.newton_max_iters = mm["newton_max_iters"].get<int>();
    if (mm.contains("newton_tol")) cfg.plan.mm.newton_tol = mm["newton_tol"].get<double>();
  }
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    reject_unknown_keys(q, {"points_per_panel", "edge_inset"}, "quadrature");
    if (q.contains("points_per_panel")) cfg.plan.quad.points_per_panel = q["points_per_panel"].get<int>();
    if (q.contains("edge_inset")) cfg.plan.quad.edge_inset = q["edge_inset"].get<double>();
  }
  cfg.plan.validate();
  if (cfg.workers < 1) throw SpecParseError("config: workers must be >= 1");
  return cfg;
}

namespace {

std::map<std::pair<int, std::size_t>, double> mean_k_by_cell(const std::vector<ScenarioResult>& rows) {
  std::map<std::pair<int, std::size_t>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    auto& [sum, count] = acc[{r.k, r.n}];
    sum += r.K;
    ++count;
  }
  std::map<std::pair<int, std::size_t>, double> means;
  for (const auto& [key, val] : acc) means[key] = val.first / val.second;
  return means;
}

}  // namespace

std::string means_table_csv(const std::vector<ScenarioResult>& rows) {
  const auto means = mean_k_by_cell(rows);
  std::set<int> ks;
  std::set<std::size_t> ns;
  for (const auto& [key, _] : means) {
    ks.insert(key.first);
    ns.insert(key.second);
  }
  std::string out = "k";
  for (std::size_t n : ns) out += ",n=" + std::to_string(n);
  out += "\n";
  char buf[40];
  for (int k : ks) {
    out += std::to_string(k);
    for (std::size_t n : ns) {
      auto it = means.find({k, n});
      if (it == means.end()) {
        out += ",";
      } else {
        std::snprintf(buf, sizeof(buf), ",%.17g", it->second);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

std::string means_heatmap_svg(const std::vector<ScenarioResult>& rows) {
  const auto means = mean_k_by_cell(rows);
  std::set<int> ks;
  std::set<std::size_t> ns;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [key, v] : means) {
    ks.insert(key.first);
    ns.insert(key.second);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;

  const int cell = 60, margin = 70;
  const int width = margin + cell * static_cast<int>(ns.size()) + 20;
  const int height = margin + cell * static_cast<int>(ks.size()) + 20;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  svg << "<text x=\"" << margin + cell * ns.size() / 2 << "\" y=\"20\" text-anchor=\"middle\">"
      << "mean K by sample size n (columns) and components k (rows)</text>\n";

  int row = 0;
  for (int k : ks) {
    svg << "<text x=\"" << margin - 10 << "\" y=\"" << margin + row * cell + cell / 2
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">k=" << k << "</text>\n";
    int col = 0;
    for (std::size_t n : ns) {
      auto it = means.find({k, n});
      if (it != means.end()) {
        // Linear ramp: low K = dark blue, high K = light yellow.
        const double t = (it->second - lo) / span;
        const int r = static_cast<int>(30 + 225 * t);
        const int g = static_cast<int>(50 + 190 * t);
        const int b = static_cast<int>(140 - 60 * t);
        svg << "<rect class=\"cell\" x=\"" << margin + col * cell << "\" y=\""
            << margin + row * cell << "\" width=\"" << cell << "\" height=\"" << cell
            << "\" fill=\"rgb(" << r << "," << g << "," << b << ")\"/>\n";
      }
      ++col;
    }
    ++row;
  }
  int col = 0;
  for (std::size_t n : ns) {
    svg << "<text x=\"" << margin + col * cell + cell / 2 << "\" y=\"" << margin - 10
        << "\" text-anchor=\"middle\">n=" << n << "</text>\n";
    ++col;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mixest
