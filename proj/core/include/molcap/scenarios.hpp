#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "molcap/channel.hpp"
#include "molcap/solver.hpp"

namespace molcap {

// Level scenario: one colony, n*N receptors, grid on [0, peak], average
// budget config.budget.
CapacityResult ls_capacity(const ScenarioConfig& config,
                           const LigandParams& params,
                           const SolverOptions& options = {},
                           int grid_points = 201);

// Type scenario without blocking: solves one colony with n*N/m receptors,
// peak/m and budget/m, and scales capacity (and certificate) by m. With
// m == 1 this is exactly ls_capacity.
CapacityResult ts_capacity(const ScenarioConfig& config,
                           const LigandParams& params,
                           const SolverOptions& options = {},
                           int grid_points = 201);

struct BlockingOptions {
  std::optional<double> per_type_peak;  // default: config.peak / config.types
  std::size_t max_channel_bytes = std::size_t{2} << 30;
};

// Type scenario with cross-type blocking: joint alternating maximization
// over the m-dimensional input grid with a per-dimension budget of
// config.budget / m. Throws std::runtime_error when the joint transition
// matrix would exceed max_channel_bytes (the message states the required
// amount).
CapacityResult ts_blocking_capacity(const ScenarioConfig& config,
                                    const BlockingParams& params,
                                    const SolverOptions& options = {},
                                    int grid_points_per_dim = 41,
                                    const BlockingOptions& blocking = {});

enum class SweepParameter { peak, noise, types };

// Average budget at a sweep point: an explicit value when set, otherwise a
// fraction of the current peak.
struct BudgetRule {
  std::optional<double> value;
  double fraction = 0.5;

  double resolve(double peak) const { return value ? *value : fraction * peak; }
};

struct SweepSpec {
  SweepParameter varying = SweepParameter::peak;
  std::vector<double> values;  // nonempty, strictly increasing
  ScenarioConfig base;         // fixed parameters; the varying one is ignored
  LigandParams ligand;
  std::optional<BlockingParams> blocking_rates;
  SolverOptions solver;

  bool include_ls = true;
  std::vector<int> ts_types;  // m values evaluated per row (TS columns)
  bool include_upper = false;
  bool include_lower = false;
  bool include_blocking = false;

  BudgetRule ls_budget;  // alpha for LS (and the upper bound)
  BudgetRule ts_budget;  // total alpha for TS; each colony gets /m

  int grid_points = 201;
  int blocking_grid = 41;
  std::optional<double> per_type_peak;

  void validate() const;  // throws std::domain_error
};

struct SweepRecord {
  double parameter = 0.0;
  std::optional<double> ls;
  std::vector<std::pair<int, double>> ts;  // (m, nats), in ts_types order
  std::optional<double> upper;             // may be +infinity
  std::optional<double> lower;
  std::optional<double> blocking;
  bool converged = true;
  double gap = 0.0;   // largest solver gap among the row's solves
  std::string error;  // nonempty when a quantity at this point failed
};

struct SweepTable {
  std::string parameter_name;  // "As", "Ane" or "m"
  std::vector<int> ts_types;   // TS column m values; empty when varying m
  bool has_ls = false;
  bool has_ts = false;
  bool has_upper = false;
  bool has_lower = false;
  bool has_blocking = false;
  std::vector<SweepRecord> rows;
};

// Evaluates every requested quantity at every parameter value, in order.
// A failure at one point is recorded in that row and the sweep continues.
SweepTable run_sweep(const SweepSpec& spec);

}  // namespace molcap
