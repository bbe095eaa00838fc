#include "molcap/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "molcap/ligand.hpp"

namespace molcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Natural-log binary entropy, 0 at the endpoints by continuity.
double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

}  // namespace

void BoundInputs::validate() const {
  if (receptor_count < 1) {
    throw std::domain_error("BoundInputs: receptor count must be positive");
  }
  if (peak < 0.0 || budget < 0.0 || budget > peak || noise < 0.0) {
    throw std::domain_error(
        "BoundInputs: requires 0 <= budget <= peak and noise >= 0");
  }
  if (!(rates.gamma > 0.0) || !(rates.kappa > 0.0)) {
    throw std::domain_error("BoundInputs: rates must be positive");
  }
}

double symmetrized_kl(std::span<const double> input_dist,
                      std::span<const double> binding, int receptor_count) {
  if (input_dist.size() != binding.size()) {
    throw std::invalid_argument(
        "symmetrized_kl: distribution and binding values must align");
  }
  if (receptor_count < 1) {
    throw std::invalid_argument("symmetrized_kl: receptor count must be positive");
  }
  double mean_f = 0.0, mean_l = 0.0, mean_fl = 0.0;
  for (std::size_t k = 0; k < input_dist.size(); ++k) {
    const double w = input_dist[k];
    if (w == 0.0) continue;
    const double f = binding[k];
    if (f <= 0.0 || f >= 1.0) return kInf;  // log odds diverge
    const double l = std::log(f) - std::log1p(-f);
    mean_f += w * f;
    mean_l += w * l;
    mean_fl += w * f * l;
  }
  return receptor_count * (mean_fl - mean_f * mean_l);
}

KlUpperBound kl_upper_bound(const BoundInputs& in) {
  in.validate();
  if (in.noise == 0.0) {
    return {kInf, true};  // f(0) = 0 makes the log factor diverge
  }
  const double f_alpha = binding_prob(in.budget, in.noise, in.rates);
  const double f_peak = binding_prob(in.peak, in.noise, in.rates);
  const double f_zero = binding_prob(0.0, in.noise, in.rates);
  if (f_peak == f_zero) {
    return {0.0, false};  // degenerate peak == 0
  }
  const double log_factor = std::log(f_peak * (1.0 - f_zero)) -
                            std::log(f_zero * (1.0 - f_peak));
  const double scale = static_cast<double>(in.receptor_count);
  if (f_alpha < 0.5 * f_peak) {
    return {scale * (f_alpha / f_peak) * (f_peak - f_alpha) * log_factor,
            false};
  }
  return {scale * 0.25 * f_peak * log_factor, false};
}

BinaryLowerBound binary_lower_bound(double peak, int receptor_count,
                                    const LigandParams& rates) {
  if (peak < 0.0) {
    throw std::domain_error("binary_lower_bound: negative peak");
  }
  if (receptor_count < 1) {
    throw std::domain_error("binary_lower_bound: receptor count must be positive");
  }
  if (peak == 0.0) {
    return {0.0, 1.0};  // both inputs coincide at zero
  }
  const double p_b = binding_prob(peak, 0.0, rates);
  const double p_c = std::exp(receptor_count * std::log1p(-p_b));
  const double g = binary_entropy(p_c) / (1.0 - p_c);
  const double e_g = std::exp(g);
  const double nats = binary_entropy(1.0 / (1.0 + e_g)) - g / (1.0 + e_g);
  const double weight =
      1.0 / (1.0 + 1.0 / (std::exp(-p_c * std::log(p_c) / (1.0 - p_c)) - p_c));
  return {nats, weight};
}

double asymptotic_capacity(int trials) {
  if (trials < 1) {
    throw std::domain_error("asymptotic_capacity: trials must be positive");
  }
  const double n = static_cast<double>(trials);
  return 0.5 * std::log(n / (2.0 * std::numbers::pi * std::numbers::e)) +
         std::log(std::numbers::pi);
}

}  // namespace molcap
