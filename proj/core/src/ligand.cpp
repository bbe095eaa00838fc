#include "molcap/ligand.hpp"

#include <stdexcept>

namespace molcap {

namespace {

void check_rates(const LigandParams& params, const char* what) {
  if (!(params.gamma > 0.0) || !(params.kappa > 0.0)) {
    throw std::domain_error(std::string(what) + ": rates must be positive");
  }
}

}  // namespace

double binding_prob(double x, double a_ne, const LigandParams& params) {
  check_rates(params, "binding_prob");
  if (x < 0.0 || a_ne < 0.0) {
    throw std::domain_error("binding_prob: negative concentration");
  }
  const double total = x + a_ne;
  return total / (total + params.half_saturation());
}

ReceptorState blocking_probs(double x_own, std::span<const double> x_others,
                             const ColonyRates& rates) {
  check_rates(rates.own, "blocking_probs");
  // A zero blocking rate is legal (decoupled colonies); the unblocking rate
  // must stay positive for the chain to have a stationary law.
  if (rates.block.gamma < 0.0 || !(rates.block.kappa > 0.0)) {
    throw std::domain_error("blocking_probs: invalid blocking rates");
  }
  if (x_own < 0.0) {
    throw std::domain_error("blocking_probs: negative concentration");
  }
  double foreign = 0.0;
  for (double x : x_others) {
    if (x < 0.0) {
      throw std::domain_error("blocking_probs: negative concentration");
    }
    foreign += x;
  }
  // Detailed balance of the empty/full/blocked chain: occupation odds are
  // (gamma/kappa) * concentration for each arm.
  const double own_odds = x_own / rates.own.half_saturation();
  const double block_odds = foreign / rates.block.half_saturation();
  const double denom = own_odds + block_odds + 1.0;
  return ReceptorState{own_odds / denom, block_odds / denom, 1.0 / denom};
}

}  // namespace molcap
