#include "molcap/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "molcap/bounds.hpp"

namespace molcap {

CapacityResult ls_capacity(const ScenarioConfig& config,
                           const LigandParams& params,
                           const SolverOptions& options, int grid_points) {
  config.validate();
  const DiscreteChannel channel = build_channel(config, params, grid_points);
  return blahut_arimoto_constrained(channel, config.budget, options);
}

CapacityResult ts_capacity(const ScenarioConfig& config,
                           const LigandParams& params,
                           const SolverOptions& options, int grid_points) {
  config.validate();
  ScenarioConfig colony = config;
  colony.bacteria = config.bacteria / config.types;
  colony.types = 1;
  colony.peak = config.peak / config.types;
  colony.budget = config.budget / config.types;
  CapacityResult result = ls_capacity(colony, params, options, grid_points);
  const double m = static_cast<double>(config.types);
  result.capacity *= m;
  result.gap *= m;
  result.dual_slack *= m;
  return result;
}

CapacityResult ts_blocking_capacity(const ScenarioConfig& config,
                                    const BlockingParams& params,
                                    const SolverOptions& options,
                                    int grid_points_per_dim,
                                    const BlockingOptions& blocking) {
  config.validate();
  const int m = config.types;
  if (m < 2) {
    throw std::domain_error("ts_blocking_capacity: needs at least two types");
  }
  std::size_t joint_inputs = 1, joint_outputs = 1;
  for (int i = 0; i < m; ++i) {
    joint_inputs *= static_cast<std::size_t>(grid_points_per_dim);
    joint_outputs *= static_cast<std::size_t>(config.receptors_per_type()) + 1;
  }
  const std::size_t bytes = joint_inputs * joint_outputs * sizeof(double);
  if (bytes > blocking.max_channel_bytes) {
    throw std::runtime_error(
        "ts_blocking_capacity: joint transition matrix needs " +
        std::to_string(bytes) + " bytes, limit is " +
        std::to_string(blocking.max_channel_bytes));
  }
  const DiscreteChannel channel = build_blocking_channel(
      config, params, grid_points_per_dim, blocking.per_type_peak);
  const std::vector<double> budgets(m, config.budget / m);
  return blahut_arimoto_constrained(channel, budgets, options);
}

void SweepSpec::validate() const {
  if (values.empty()) {
    throw std::domain_error("SweepSpec: values must be nonempty");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw std::domain_error("SweepSpec: values must be strictly increasing");
    }
    if (values[i] < 0.0) {
      throw std::domain_error("SweepSpec: negative parameter value");
    }
    if (varying == SweepParameter::types &&
        values[i] != std::floor(values[i])) {
      throw std::domain_error("SweepSpec: type counts must be integers");
    }
  }
  if (include_lower && base.noise != 0.0) {
    throw std::domain_error(
        "SweepSpec: the binary lower bound requires zero ambient noise");
  }
  if (include_blocking && !blocking_rates) {
    throw std::domain_error("SweepSpec: blocking requested without rates");
  }
  const bool has_ts = varying == SweepParameter::types || !ts_types.empty();
  if (!include_ls && !has_ts && !include_blocking && !include_upper &&
      !include_lower) {
    throw std::domain_error("SweepSpec: nothing to evaluate");
  }
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  switch (spec.varying) {
    case SweepParameter::peak: table.parameter_name = "As"; break;
    case SweepParameter::noise: table.parameter_name = "Ane"; break;
    case SweepParameter::types: table.parameter_name = "m"; break;
  }
  const bool vary_types = spec.varying == SweepParameter::types;
  table.ts_types = vary_types ? std::vector<int>{} : spec.ts_types;
  table.has_ls = spec.include_ls;
  table.has_ts = vary_types || !spec.ts_types.empty();
  table.has_upper = spec.include_upper;
  table.has_lower = spec.include_lower;
  table.has_blocking = spec.include_blocking;

  for (double value : spec.values) {
    SweepRecord rec;
    rec.parameter = value;
    ScenarioConfig point = spec.base;
    switch (spec.varying) {
      case SweepParameter::peak: point.peak = value; break;
      case SweepParameter::noise: point.noise = value; break;
      case SweepParameter::types: point.types = static_cast<int>(value); break;
    }
    const double ls_budget = spec.ls_budget.resolve(point.peak);
    const double ts_budget = spec.ts_budget.resolve(point.peak);
    auto note = [&rec](bool converged, double gap) {
      rec.converged = rec.converged && converged;
      rec.gap = std::max(rec.gap, gap);
    };
    try {
      if (spec.include_ls) {
        ScenarioConfig ls = point;
        ls.types = 1;
        ls.budget = std::min(ls_budget, ls.peak);
        const CapacityResult r =
            ls_capacity(ls, spec.ligand, spec.solver, spec.grid_points);
        rec.ls = r.capacity;
        note(r.converged, r.gap);
      }
      const std::vector<int> ts_list =
          vary_types ? std::vector<int>{static_cast<int>(value)}
                     : spec.ts_types;
      for (int m : ts_list) {
        ScenarioConfig ts = point;
        ts.types = m;
        ts.budget = std::min(ts_budget, ts.peak);
        const CapacityResult r =
            ts_capacity(ts, spec.ligand, spec.solver, spec.grid_points);
        rec.ts.emplace_back(m, r.capacity);
        note(r.converged, r.gap);
      }
      if (spec.include_upper) {
        BoundInputs in;
        in.receptor_count = point.total_receptors();
        in.peak = point.peak;
        in.budget = std::min(ls_budget, point.peak);
        in.noise = point.noise;
        in.rates = spec.ligand;
        rec.upper = kl_upper_bound(in).nats;
      }
      if (spec.include_lower) {
        rec.lower =
            binary_lower_bound(point.peak, point.total_receptors(), spec.ligand)
                .nats;
      }
      if (spec.include_blocking) {
        ScenarioConfig bl = point;
        if (bl.types < 2) bl.types = spec.base.types;
        bl.budget = std::min(ts_budget, bl.peak);
        BlockingOptions opts;
        opts.per_type_peak = spec.per_type_peak;
        const CapacityResult r =
            ts_blocking_capacity(bl, *spec.blocking_rates, spec.solver,
                                 spec.blocking_grid, opts);
        rec.blocking = r.capacity;
        note(r.converged, r.gap);
      }
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.converged = false;
    }
    table.rows.push_back(std::move(rec));
  }
  return table;
}

}  // namespace molcap
