#include "mixest/mixture.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mixest {

void MixtureParams::validate() const {
  if (weights.empty() || weights.size() != components.size()) {
    throw std::invalid_argument("MixtureParams: need k >= 1 weights matching k components");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("MixtureParams: weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("MixtureParams: weights must sum to 1 within 1e-12");
  }
  for (const auto& c : components) c.validate();
}

double mixture_pdf(double x, const MixtureParams& psi) {
  double v = 0.0;
  for (std::size_t j = 0; j < psi.weights.size(); ++j) {
    if (psi.weights[j] > 0.0) v += psi.weights[j] * beta_pdf(x, psi.components[j]);
  }
  return v;
}

std::vector<double> renormalize_weights(const std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("renormalize_weights: weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("renormalize_weights: all weights are zero");
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / sum;
  return out;
}

std::string mixture_to_csv_row(const MixtureParams& psi) {
  char buf[32];
  std::string row = std::to_string(psi.k());
  auto append = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row += ',';
    row += buf;
  };
  for (double w : psi.weights) append(w);
  for (const auto& c : psi.components) {
    append(c.a);
    append(c.b);
  }
  return row;
}

MixtureParams mixture_from_csv_row(const std::string& row) {
  std::istringstream in(row);
  std::vector<double> fields;
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      fields.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("mixture_from_csv_row: non-numeric field '" + tok + "'");
    }
  }
  if (fields.empty()) throw std::invalid_argument("mixture_from_csv_row: empty row");
  const auto k = static_cast<std::size_t>(fields[0]);
  if (k < 1 || fields[0] != static_cast<double>(k) || fields.size() != 1 + 3 * k) {
    throw std::invalid_argument("mixture_from_csv_row: expected `k, pi_1..pi_k, a_1,b_1,..,a_k,b_k`");
  }
  MixtureParams psi;
  psi.weights.assign(fields.begin() + 1, fields.begin() + 1 + k);
  for (std::size_t j = 0; j < k; ++j) {
    psi.components.push_back({fields[1 + k + 2 * j], fields[1 + k + 2 * j + 1]});
  }
  psi.validate();
  return psi;
}

}  // namespace mixest
