#ifndef MIXEST_MIXTURE_HPP
#define MIXEST_MIXTURE_HPP

#include <string>
#include <vector>

#include "mixest/densities.hpp"

namespace mixest {

/// psi_k = (pi_1..pi_k, theta_1..theta_k): simplex weights plus k beta
/// component parameter pairs.
struct MixtureParams {
  std::vector<double> weights;
  std::vector<ComponentParams> components;

  std::size_t k() const { return weights.size(); }
  void validate() const;
  bool operator==(const MixtureParams&) const = default;
};

/// f_k(x; psi) = sum_j pi_j * beta_pdf(x; theta_j).
double mixture_pdf(double x, const MixtureParams& psi);

/// Projects non-negative weights back onto the simplex. Throws on all-zero input.
std::vector<double> renormalize_weights(const std::vector<double>& weights);

/// Flat text record `k, pi_1..pi_k, a_1,b_1,...,a_k,b_k` (one CSV row).
std::string mixture_to_csv_row(const MixtureParams& psi);
MixtureParams mixture_from_csv_row(const std::string& row);

}  // namespace mixest

#endif
