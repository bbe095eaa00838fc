#include "molcap/channel.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace molcap {

namespace {

constexpr double kRowSumSlack = 1e-12;
constexpr double kFlushBelow = 1e-250;  // binomial tail underflow floor

std::vector<double> uniform_grid(double peak, int points) {
  if (points < 2) {
    throw std::invalid_argument("grid needs at least 2 points");
  }
  if (peak < 0.0) {
    throw std::domain_error("peak concentration must be nonnegative");
  }
  if (peak == 0.0) {
    return {0.0};  // all grid points coincide
  }
  std::vector<double> grid(points);
  for (int j = 0; j < points; ++j) {
    grid[j] = peak * static_cast<double>(j) / (points - 1);
  }
  grid.back() = peak;
  return grid;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (bacteria < 1 || receptors < 1 || types < 1) {
    throw std::domain_error("ScenarioConfig: counts must be positive");
  }
  if (bacteria % types != 0 || (bacteria * receptors) % types != 0) {
    throw std::domain_error(
        "ScenarioConfig: types must divide both the bacteria count and the "
        "total receptor count");
  }
  if (peak < 0.0 || budget < 0.0 || budget > peak || noise < 0.0) {
    throw std::domain_error(
        "ScenarioConfig: requires 0 <= budget <= peak and noise >= 0");
  }
}

std::size_t DiscreteChannel::num_inputs() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.size();
  return n;
}

std::size_t DiscreteChannel::axis_index(std::size_t input,
                                        std::size_t dim) const {
  std::size_t stride = 1;
  for (std::size_t d = axes.size(); d-- > dim + 1;) stride *= axes[d].size();
  return (input / stride) % axes[dim].size();
}

std::vector<double> DiscreteChannel::input(std::size_t index) const {
  std::vector<double> point(axes.size());
  for (std::size_t d = 0; d < axes.size(); ++d) {
    point[d] = axes[d][axis_index(index, d)];
  }
  return point;
}

double DiscreteChannel::cost(std::size_t input, std::size_t dim) const {
  return costs[dim][axis_index(input, dim)];
}

void DiscreteChannel::validate() const {
  if (axes.empty() || output_size == 0) {
    throw std::invalid_argument("DiscreteChannel: empty channel");
  }
  if (costs.size() != axes.size()) {
    throw std::invalid_argument("DiscreteChannel: costs/axes dimension mismatch");
  }
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (axes[d].empty() || costs[d].size() != axes[d].size()) {
      throw std::invalid_argument("DiscreteChannel: malformed axis " +
                                  std::to_string(d));
    }
    for (std::size_t j = 0; j < axes[d].size(); ++j) {
      if (j > 0 && !(axes[d][j] > axes[d][j - 1])) {
        throw std::invalid_argument(
            "DiscreteChannel: axis values must be strictly increasing");
      }
      if (costs[d][j] < 0.0) {
        throw std::invalid_argument("DiscreteChannel: negative cost");
      }
    }
  }
  const std::size_t n = num_inputs();
  if (transition.size() != n * output_size) {
    throw std::invalid_argument("DiscreteChannel: transition size mismatch");
  }
  for (std::size_t x = 0; x < n; ++x) {
    const double* r = row(x);
    double sum = 0.0;
    for (std::size_t y = 0; y < output_size; ++y) {
      if (r[y] < 0.0 || r[y] > 1.0) {
        throw std::invalid_argument(
            "DiscreteChannel: transition entry outside [0,1]");
      }
      sum += r[y];
    }
    if (std::abs(sum - 1.0) > kRowSumSlack) {
      throw std::invalid_argument("DiscreteChannel: row " + std::to_string(x) +
                                  " does not sum to 1");
    }
  }
}

std::vector<double> binomial_row(double p, int trials) {
  if (trials < 1) {
    throw std::invalid_argument("binomial_row: trials must be positive");
  }
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::domain_error("binomial_row: p outside [0,1]");
  }
  std::vector<double> row(static_cast<std::size_t>(trials) + 1, 0.0);
  if (p == 0.0) {
    row.front() = 1.0;
    return row;
  }
  if (p == 1.0) {
    row.back() = 1.0;
    return row;
  }
  const double log_p = std::log(p);
  const double log_1mp = std::log1p(-p);
  const double log_n_fact = std::lgamma(trials + 1.0);
  for (int y = 0; y <= trials; ++y) {
    const double log_coeff =
        log_n_fact - std::lgamma(y + 1.0) - std::lgamma(trials - y + 1.0);
    const double v = std::exp(log_coeff + y * log_p + (trials - y) * log_1mp);
    row[y] = v < kFlushBelow ? 0.0 : v;
  }
  return row;
}

DiscreteChannel build_channel(const ScenarioConfig& config,
                              const LigandParams& params, int grid_points) {
  config.validate();
  const int trials = config.total_receptors();
  DiscreteChannel ch;
  ch.axes.push_back(uniform_grid(config.peak, grid_points));
  ch.costs = ch.axes;
  ch.output_size = static_cast<std::size_t>(trials) + 1;
  ch.transition.reserve(ch.axes[0].size() * ch.output_size);
  for (double x : ch.axes[0]) {
    const auto row = binomial_row(binding_prob(x, config.noise, params), trials);
    ch.transition.insert(ch.transition.end(), row.begin(), row.end());
  }
  return ch;
}

DiscreteChannel build_blocking_channel(const ScenarioConfig& config,
                                       const BlockingParams& params,
                                       int grid_points_per_dim,
                                       std::optional<double> per_type_peak) {
  config.validate();
  const std::size_t m = static_cast<std::size_t>(config.types);
  if (m < 2) {
    throw std::invalid_argument(
        "build_blocking_channel: needs at least two molecule types");
  }
  if (params.colonies.size() != m) {
    throw std::invalid_argument(
        "build_blocking_channel: one ColonyRates entry per type required");
  }
  const int trials = config.receptors_per_type();
  const double peak = per_type_peak.value_or(config.peak / config.types);

  DiscreteChannel ch;
  ch.axes.assign(m, uniform_grid(peak, grid_points_per_dim));
  ch.costs = ch.axes;
  std::size_t outputs = 1;
  for (std::size_t i = 0; i < m; ++i) {
    outputs *= static_cast<std::size_t>(trials) + 1;
  }
  ch.output_size = outputs;

  const std::size_t inputs = ch.num_inputs();
  ch.transition.assign(inputs * outputs, 0.0);
  std::vector<double> point(m), others(m - 1), joint, next;
  for (std::size_t k = 0; k < inputs; ++k) {
    for (std::size_t d = 0; d < m; ++d) {
      point[d] = ch.axes[d][ch.axis_index(k, d)];
    }
    // Colonies are conditionally independent given the whole input tuple, so
    // the joint row is the tensor product of the per-colony binomial rows.
    joint.assign(1, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t o = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) others[o++] = point[j] + config.noise;
      }
      const double p_full =
          blocking_probs(point[i] + config.noise, others, params.colonies[i])
              .full;
      const auto row = binomial_row(p_full, trials);
      next.assign(joint.size() * row.size(), 0.0);
      for (std::size_t a = 0; a < joint.size(); ++a) {
        for (std::size_t y = 0; y < row.size(); ++y) {
          next[a * row.size() + y] = joint[a] * row[y];
        }
      }
      joint.swap(next);
    }
    std::copy(joint.begin(), joint.end(), ch.transition.begin() + k * outputs);
  }
  return ch;
}

}  // namespace molcap
