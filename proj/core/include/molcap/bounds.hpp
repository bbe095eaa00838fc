#pragma once

#include <span>

#include "molcap/ligand.hpp"

namespace molcap {

struct BoundInputs {
  int receptor_count = 80;  // n*N
  double peak = 80.0;       // A
  double budget = 40.0;     // alpha, 0 <= budget <= peak
  double noise = 0.0;       // A_ne
  LigandParams rates;

  void validate() const;  // throws std::domain_error
};

// Symmetrized KL divergence between p(x,y) and p(x)p(y) for a Binomial
// channel, which collapses to
//   receptor_count * Cov(f, log(f / (1 - f)))
// under the input distribution, where binding[k] is the binding probability
// of grid point k (noise already folded in). Upper-bounds the mutual
// information of the same distribution. Returns +infinity when a grid point
// with positive mass has binding probability exactly 0 or 1.
double symmetrized_kl(std::span<const double> input_dist,
                      std::span<const double> binding, int receptor_count);

struct KlUpperBound {
  double nats = 0.0;
  bool vacuous = false;  // zero ambient noise makes the bound infinite
};

// Closed-form maximum of symmetrized_kl over input distributions with mean
// budget and peak constraints. With f_a = f(budget+noise), f_A = f(peak+noise),
// f_0 = f(noise) and E = log(f_A (1-f_0) / (f_0 (1-f_A))):
//   nN * (f_a/f_A) (f_A - f_a) E   when f_a <  f_A / 2,
//   nN * (f_A/4) E                 when f_a >= f_A / 2.
// At zero noise the bound diverges; {+inf, vacuous=true} is returned.
KlUpperBound kl_upper_bound(const BoundInputs& in);

struct BinaryLowerBound {
  double nats = 0.0;
  double weight_on_zero = 1.0;  // optimal mass on the silent input
};

// Exact capacity of the binary-input restriction {0, peak} of the noiseless
// Binomial channel; a lower bound on the full capacity. With
// p_b = peak/(peak + kappa/gamma), p_c = (1-p_b)^R and
// g = H(p_c)/(1-p_c) (natural-log binary entropy H):
//   nats = H(1/(1+e^g)) - g/(1+e^g).
// peak == 0 degenerates to {0, weight 1}.
BinaryLowerBound binary_lower_bound(double peak, int receptor_count,
                                    const LigandParams& rates);

// Large-trial-count reference value 0.5 log(n / (2 pi e)) + log pi for the
// unconstrained Binomial channel. Valid asymptotically only; small n gives
// meaningless (even negative) values, returned as-is.
double asymptotic_capacity(int trials);

}  // namespace molcap
