#pragma once

#include <span>
#include <vector>

namespace molcap {

// Association/dissociation rate pair for one molecule type. The ratio
// kappa/gamma is the half-saturation concentration: binding probability
// reaches 1/2 when the local concentration equals it.
struct LigandParams {
  double gamma = 0.0004;  // association rate, concentration^-1 time^-1
  double kappa = 0.1;     // dissociation rate, time^-1

  double half_saturation() const { return kappa / gamma; }
};

// Rates for one colony in the multi-type setting. `own` governs binding of
// the matching molecule type, `block` governs occupation of the receptor by
// any foreign type.
struct ColonyRates {
  LigandParams own;
  LigandParams block;
};

struct BlockingParams {
  std::vector<ColonyRates> colonies;
};

// Stationary occupation probabilities of a single receptor. Sums to 1.
struct ReceptorState {
  double full = 0.0;
  double block = 0.0;
  double empty = 1.0;
};

// Steady-state probability that a receptor is bound by its own molecule type:
// (x + a_ne) / (x + a_ne + kappa/gamma). Increasing and concave in x, value
// in [0, 1). Throws std::domain_error on negative concentrations or
// non-positive rates.
double binding_prob(double x, double a_ne, const LigandParams& params);

// Stationary distribution of the empty/full/blocked receptor chain for one
// colony. x_others holds the concentration of every foreign molecule type.
ReceptorState blocking_probs(double x_own, std::span<const double> x_others,
                             const ColonyRates& rates);

}  // namespace molcap
