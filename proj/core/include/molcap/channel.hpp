#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "molcap/ligand.hpp"

namespace molcap {

// Colony layout and signalling constraints shared by all scenarios.
struct ScenarioConfig {
  int bacteria = 16;    // n, total count across all colonies
  int receptors = 5;    // N, receptors per bacterium
  int types = 1;        // m, molecule types == colonies
  double peak = 80.0;   // A_s, peak concentration
  double budget = 40.0; // alpha, average-concentration budget E[X] <= budget
  double noise = 0.0;   // A_ne, ambient same-type concentration

  int total_receptors() const { return bacteria * receptors; }
  int receptors_per_type() const { return total_receptors() / types; }

  // Requires positive counts, types dividing both n and n*N,
  // 0 <= budget <= peak and noise >= 0. Throws std::domain_error.
  void validate() const;
};

// Finite-input channel over outputs {0, ..., output_size-1}. Inputs are the
// Cartesian product of the per-dimension axes, enumerated with the last axis
// fastest; scalar channels have a single axis. axes[d] is strictly
// increasing and costs[d] aligns with it (cost of a tuple along dimension d
// is costs[d] at that coordinate).
struct DiscreteChannel {
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> costs;
  std::vector<double> transition;  // row-major, num_inputs() x output_size
  std::size_t output_size = 0;

  std::size_t dims() const { return axes.size(); }
  std::size_t num_inputs() const;
  std::size_t axis_index(std::size_t input, std::size_t dim) const;
  std::vector<double> input(std::size_t index) const;
  double cost(std::size_t input, std::size_t dim) const;
  const double* row(std::size_t input) const {
    return transition.data() + input * output_size;
  }

  // Row stochasticity within 1e-12, entries in [0,1], axes strictly
  // increasing, costs nonnegative. Throws std::invalid_argument.
  void validate() const;
};

// Binomial pmf over {0, ..., trials}, evaluated through log-gamma in the log
// domain. Entries below 1e-250 are flushed to zero. Throws std::domain_error
// for p outside [0,1] and std::invalid_argument for trials < 1.
std::vector<double> binomial_row(double p, int trials);

// Single-type channel: uniform grid of grid_points concentrations on
// [0, peak] (a single point when peak == 0), cost of input x is x, output is
// the number of bound receptors among all n*N of them.
DiscreteChannel build_channel(const ScenarioConfig& config,
                              const LigandParams& params, int grid_points);

// Multi-type channel with cross-type receptor blocking. Each of the m
// coordinates gets grid_points_per_dim values on [0, per_type_peak]
// (default peak/m). Outputs are tuples of per-colony bound counts,
// conditionally independent given the full input tuple.
DiscreteChannel build_blocking_channel(
    const ScenarioConfig& config, const BlockingParams& params,
    int grid_points_per_dim,
    std::optional<double> per_type_peak = std::nullopt);

}  // namespace molcap
