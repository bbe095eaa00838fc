#pragma once

#include <span>
#include <utility>
#include <vector>

#include "molcap/channel.hpp"

namespace molcap {

struct SolverOptions {
  double tolerance = 1e-7;             // certificate gap target, nats
  int max_iterations = 50000;          // per inner solve
  double multiplier_tolerance = 1e-4;  // relative mean-cost tolerance
  bool record_trace = false;           // keep per-iteration certificates
};

// One entry per completed iteration of the final (certified) solve.
struct IterationTrace {
  double lower;      // I(p) after the iteration
  double upper;      // max_x D(p(.|x) || q)
  double objective;  // I(p) - sum_d s_d E[cost_d], the ascended quantity
};

struct CapacityResult {
  double capacity = 0.0;  // I(p) at the returned distribution, nats
  std::vector<double> input_distribution;
  double mean_cost = 0.0;          // summed across input dimensions
  std::vector<double> mean_costs;  // per input dimension
  int iterations = 0;              // total iterations over all inner solves
  // Certificate gap of the final solve: with multipliers s it bounds the
  // tilted objective, and the grid capacity satisfies
  //   capacity <= C_grid <= capacity + gap + dual_slack.
  double gap = 0.0;
  double dual_slack = 0.0;  // sum_d s_d (budget_d - mean_cost_d); 0 unconstrained
  bool converged = false;
  std::vector<IterationTrace> trace;  // filled when record_trace
};

// I(X;Y) in nats for a fixed input distribution, 0 log 0 taken as 0.
// Throws std::invalid_argument on dimension mismatch or an invalid
// distribution.
double mutual_information(std::span<const double> input_dist,
                          const DiscreteChannel& channel);

// (I(p), max_x D(p(.|x)||q)): the grid capacity lies between the two. A
// positive row entry over a zero output marginal yields an infinite upper
// component.
std::pair<double, double> capacity_certificate(
    std::span<const double> input_dist, const DiscreteChannel& channel);

// Alternating maximization from the uniform distribution, stopping when the
// certificate gap max_x D(p(.|x)||q) - I(p) falls below options.tolerance.
// Exhausting max_iterations returns converged == false, not an error.
CapacityResult blahut_arimoto(const DiscreteChannel& channel,
                              const SolverOptions& options = {});

// Capacity under E[cost_d] <= budgets[d] for every input dimension. Runs the
// unconstrained solve first; when some budget is violated, searches Lagrange
// multipliers (bisection per dimension, cyclic over dimensions) so that each
// constrained mean lands within multiplier_tolerance of its budget, then
// certifies the final solve at full tolerance. Throws std::domain_error when
// a budget is below the minimum input cost.
CapacityResult blahut_arimoto_constrained(const DiscreteChannel& channel,
                                          std::span<const double> budgets,
                                          const SolverOptions& options = {});
CapacityResult blahut_arimoto_constrained(const DiscreteChannel& channel,
                                          double budget,
                                          const SolverOptions& options = {});

}  // namespace molcap
