#include "molcap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace molcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Mass below this cannot influence sums at double precision; skipping it
// keeps +inf divergences of abandoned inputs out of I(p).
constexpr double kDeadMass = 1e-300;
// Cap on the update exponent so a certificate +inf (an output marginal hole)
// steers mass back without producing NaN.
constexpr double kTiltCap = 1400.0;

// Per-channel constants shared by every pass.
struct Dense {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  const double* rows = nullptr;
  std::vector<double> row_self;           // sum_y p(y|x) log p(y|x)
  std::vector<std::vector<double>> cost;  // [dim][input]
  std::vector<std::size_t> axis_sizes;    // input grid shape

  Dense() = default;

  explicit Dense(const DiscreteChannel& ch)
      : inputs(ch.num_inputs()), outputs(ch.output_size),
        rows(ch.transition.data()) {
    compute_row_self();
    cost.resize(ch.dims());
    for (std::size_t d = 0; d < ch.dims(); ++d) {
      cost[d].resize(inputs);
      for (std::size_t x = 0; x < inputs; ++x) cost[d][x] = ch.cost(x, d);
      axis_sizes.push_back(ch.axes[d].size());
    }
  }

  // Indices whose value is a local maximum along every grid axis; these are
  // the cluster representatives of a near-converged input distribution.
  std::vector<std::size_t> local_maxima(const std::vector<double>& v,
                                        double floor) const {
    std::vector<std::size_t> strides(axis_sizes.size(), 1);
    for (std::size_t d = axis_sizes.size(); d-- > 1;) {
      strides[d - 1] = strides[d] * axis_sizes[d];
    }
    std::vector<std::size_t> peaks;
    for (std::size_t x = 0; x < inputs; ++x) {
      if (v[x] <= floor) continue;
      bool is_peak = true;
      for (std::size_t d = 0; d < axis_sizes.size() && is_peak; ++d) {
        const std::size_t coord = (x / strides[d]) % axis_sizes[d];
        if (coord > 0 && v[x - strides[d]] > v[x]) is_peak = false;
        if (coord + 1 < axis_sizes[d] && v[x + strides[d]] > v[x]) {
          is_peak = false;
        }
      }
      if (is_peak) peaks.push_back(x);
    }
    return peaks;
  }

  void compute_row_self() {
    row_self.assign(inputs, 0.0);
    for (std::size_t x = 0; x < inputs; ++x) {
      const double* row = rows + x * outputs;
      double acc = 0.0;
      for (std::size_t y = 0; y < outputs; ++y) {
        if (row[y] > 0.0) acc += row[y] * std::log(row[y]);
      }
      row_self[x] = acc;
    }
  }

  double tilt_shift(std::size_t x, std::span<const double> mult) const {
    double s = 0.0;
    for (std::size_t d = 0; d < cost.size(); ++d) s += mult[d] * cost[d][x];
    return s;
  }
};

struct PassStats {
  double info = 0.0;
  double lagrangian = 0.0;  // info - sum_d s_d E[cost_d]
  double cert_upper = -kInf;  // max_x (D_x - sum_d s_d cost_d(x))
  double gap = kInf;
  std::vector<double> mean_costs;
};

struct SolveState {
  std::vector<double> p;
  std::vector<double> mean_costs;
  double mutual_info = 0.0;
  double lagrangian = 0.0;
  double cert_upper = 0.0;
  double gap = kInf;
  int iterations = 0;  // full evaluation passes over the matrix
  bool converged = false;
};

// One full pass over the transition matrix: output marginal, relative
// entropies, tilted certificate and mean costs. The tilt it leaves behind
// drives multiplicative updates.
class BaEngine {
 public:
  BaEngine(const Dense& ch, std::span<const double> multipliers)
      : ch_(ch), mult_(multipliers.begin(), multipliers.end()),
        q_(ch.outputs), logq_(ch.outputs), div_(ch.inputs), tilt_(ch.inputs) {}

  PassStats evaluate(const std::vector<double>& p) {
    const std::size_t K = ch_.inputs;
    const std::size_t Y = ch_.outputs;
    const std::size_t dims = ch_.cost.size();
    std::fill(q_.begin(), q_.end(), 0.0);
    for (std::size_t x = 0; x < K; ++x) {
      const double px = p[x];
      if (px == 0.0) continue;
      const double* row = ch_.rows + x * Y;
      for (std::size_t y = 0; y < Y; ++y) q_[y] += px * row[y];
    }
    zero_cols_.clear();
    for (std::size_t y = 0; y < Y; ++y) {
      if (q_[y] > 0.0) {
        logq_[y] = std::log(q_[y]);
      } else {
        logq_[y] = 0.0;  // placeholder, only multiplied by zero row entries
        zero_cols_.push_back(y);
      }
    }

    PassStats st;
    st.mean_costs.assign(dims, 0.0);
    for (std::size_t x = 0; x < K; ++x) {
      const double* row = ch_.rows + x * Y;
      double cross = 0.0;
      for (std::size_t y = 0; y < Y; ++y) cross += row[y] * logq_[y];
      double d = ch_.row_self[x] - cross;
      for (std::size_t y : zero_cols_) {
        if (row[y] > 0.0) {
          d = kInf;  // this input was starved of mass
          break;
        }
      }
      div_[x] = d;
      const double t = d - ch_.tilt_shift(x, mult_);
      tilt_[x] = t;
      st.cert_upper = std::max(st.cert_upper, t);
    }
    for (std::size_t x = 0; x < K; ++x) {
      if (p[x] <= kDeadMass) continue;
      st.info += p[x] * div_[x];
      for (std::size_t dd = 0; dd < dims; ++dd) {
        st.mean_costs[dd] += p[x] * ch_.cost[dd][x];
      }
    }
    st.lagrangian = st.info;
    for (std::size_t dd = 0; dd < dims; ++dd) {
      st.lagrangian -= mult_[dd] * st.mean_costs[dd];
    }
    st.gap = st.cert_upper - st.lagrangian;
    return st;
  }

  const std::vector<double>& tilt() const { return tilt_; }
  double max_divergence() const {
    double upper = -kInf;
    for (double d : div_) upper = std::max(upper, d);
    return upper;
  }
  std::size_t arg_max_tilt() const {
    std::size_t best = 0;
    for (std::size_t x = 1; x < tilt_.size(); ++x) {
      if (tilt_[x] > tilt_[best]) best = x;
    }
    return best;
  }

 private:
  const Dense& ch_;
  std::vector<double> mult_;
  std::vector<double> q_, logq_;
  std::vector<double> div_, tilt_;
  std::vector<std::size_t> zero_cols_;
};

// Exact maximization of F(w) = sum_k w_k (D(P_k||q_w) - s.c_k) over the
// simplex restricted to an active set of inputs: damped Newton on the
// equalization conditions D_k - s.c_k = const. The caller re-certifies
// against the full grid, so this only needs to be a good inner polisher.
class ActiveSetSolver {
 public:
  ActiveSetSolver(const Dense& ch, std::span<const double> multipliers)
      : ch_(ch), mult_(multipliers.begin(), multipliers.end()),
        q_(ch.outputs) {}

  std::vector<std::size_t> indices;
  std::vector<double> weights;

  // Cluster representatives only: a near-converged distribution piles mass
  // onto plateaus of adjacent grid points whose rows are nearly collinear,
  // and feeding whole plateaus to the Newton system would make it singular.
  void seed(const std::vector<double>& p, std::size_t cap) {
    double max_p = 0.0;
    for (double v : p) max_p = std::max(max_p, v);
    indices = ch_.local_maxima(p, 1e-10 * max_p);
    if (indices.size() > cap) {
      std::sort(indices.begin(), indices.end(),
                [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
      indices.resize(cap);
      std::sort(indices.begin(), indices.end());
    }
    weights.clear();
    double total = 0.0;
    for (std::size_t x : indices) total += p[x];
    for (std::size_t x : indices) weights.push_back(p[x] / total);
  }

  // Multiplicative updates restricted to the active set; used to shake the
  // weights loose when a Newton line search stalls.
  void relax(int iterations) {
    for (int it = 0; it < iterations; ++it) {
      build_q(weights);
      double best = -kInf;
      std::vector<double> t(indices.size());
      for (std::size_t k = 0; k < indices.size(); ++k) {
        t[k] = divergence(indices[k]) - ch_.tilt_shift(indices[k], mult_);
        best = std::max(best, t[k]);
      }
      double z = 0.0;
      for (std::size_t k = 0; k < indices.size(); ++k) {
        weights[k] *= std::exp(std::min(t[k] - best, kTiltCap));
        z += weights[k];
      }
      for (double& w : weights) w /= z;
    }
  }

  bool contains(std::size_t x) const {
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (indices[k] == x) return true;
    }
    return false;
  }

  void add_point(std::size_t x) {
    if (contains(x)) return;
    const double seed_mass = 1e-3;
    for (double& w : weights) w *= 1.0 - seed_mass;
    indices.push_back(x);
    weights.push_back(seed_mass);
  }

  // Objective at the current weights.
  double objective() { return evaluate_f(weights); }

  void polish(int max_newton) {
    for (int it = 0; it < max_newton; ++it) {
      drop_dead_weights();
      const std::size_t n = indices.size();
      if (n <= 1) return;
      build_q(weights);
      // gradient of F (up to the constant -1 shared by all coordinates)
      std::vector<double> g(n);
      for (std::size_t k = 0; k < n; ++k) {
        g[k] = divergence(indices[k]) - ch_.tilt_shift(indices[k], mult_);
      }
      // Newton KKT system on the simplex: [H 1; 1' 0] [d; lambda] = [-g; 0]
      std::vector<double> h(n * n, 0.0);
      double ridge = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double* rk = ch_.rows + indices[k] * ch_.outputs;
        for (std::size_t l = k; l < n; ++l) {
          const double* rl = ch_.rows + indices[l] * ch_.outputs;
          double acc = 0.0;
          for (std::size_t y = 0; y < ch_.outputs; ++y) {
            if (q_[y] > 0.0) acc += rk[y] * rl[y] / q_[y];
          }
          h[k * n + l] = h[l * n + k] = -acc;
        }
        ridge = std::max(ridge, std::abs(h[k * n + k]));
      }
      ridge = ridge * 1e-12 + 1e-300;
      const std::size_t m = n + 1;
      std::vector<double> a(m * m, 0.0), rhs(m, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) a[k * m + l] = h[k * n + l];
        a[k * m + k] -= ridge;
        a[k * m + n] = 1.0;
        a[n * m + k] = 1.0;
        rhs[k] = -g[k];
      }
      if (!gauss_solve(a, rhs, m)) return;
      // direction in rhs[0..n)
      double step_limit = kInf;
      double dir_norm = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        dir_norm = std::max(dir_norm, std::abs(rhs[k]));
        if (rhs[k] < 0.0) {
          step_limit = std::min(step_limit, -weights[k] / rhs[k]);
        }
      }
      if (dir_norm < 1e-15) return;
      const double f0 = evaluate_f(weights);
      double t = std::min(1.0, 0.999 * step_limit);
      std::vector<double> trial(n);
      bool improved = false;
      for (int back = 0; back < 40 && t > 1e-18; ++back, t *= 0.5) {
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          trial[k] = std::max(weights[k] + t * rhs[k], 0.0);
          total += trial[k];
        }
        for (std::size_t k = 0; k < n; ++k) trial[k] /= total;
        if (evaluate_f(trial) >= f0 - 1e-15) {
          weights = trial;
          improved = true;
          break;
        }
      }
      if (!improved) return;
      if (dir_norm * t < 1e-14) return;
    }
  }

  // Scatter the active-set weights onto the full input grid.
  std::vector<double> full_distribution(std::size_t inputs) const {
    std::vector<double> p(inputs, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      p[indices[k]] = weights[k];
    }
    return p;
  }

 private:
  void drop_dead_weights() {
    std::size_t kept = 0;
    double total = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (weights[k] > 1e-16) {
        indices[kept] = indices[k];
        weights[kept] = weights[k];
        total += weights[k];
        ++kept;
      }
    }
    indices.resize(kept);
    weights.resize(kept);
    for (double& w : weights) w /= total;
  }

  void build_q(const std::vector<double>& w) {
    std::fill(q_.begin(), q_.end(), 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const double* row = ch_.rows + indices[k] * ch_.outputs;
      for (std::size_t y = 0; y < ch_.outputs; ++y) q_[y] += w[k] * row[y];
    }
  }

  double divergence(std::size_t x) const {
    const double* row = ch_.rows + x * ch_.outputs;
    double cross = 0.0;
    for (std::size_t y = 0; y < ch_.outputs; ++y) {
      if (row[y] > 0.0) {
        if (q_[y] <= 0.0) return kInf;
        cross += row[y] * std::log(q_[y]);
      }
    }
    return ch_.row_self[x] - cross;
  }

  double evaluate_f(const std::vector<double>& w) {
    build_q(w);
    double f = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (w[k] <= 0.0) continue;
      const double d = divergence(indices[k]);
      if (d == kInf) return -kInf;
      f += w[k] * (d - ch_.tilt_shift(indices[k], mult_));
    }
    return f;
  }

  static bool gauss_solve(std::vector<double>& a, std::vector<double>& b,
                          std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      for (std::size_t row = col + 1; row < n; ++row) {
        if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) {
          pivot = row;
        }
      }
      if (std::abs(a[pivot * n + col]) < 1e-300) return false;
      if (pivot != col) {
        for (std::size_t k = 0; k < n; ++k) {
          std::swap(a[col * n + k], a[pivot * n + k]);
        }
        std::swap(b[col], b[pivot]);
      }
      for (std::size_t row = 0; row < n; ++row) {
        if (row == col) continue;
        const double f = a[row * n + col] / a[col * n + col];
        if (f == 0.0) continue;
        for (std::size_t k = col; k < n; ++k) {
          a[row * n + k] -= f * a[col * n + k];
        }
        b[row] -= f * b[col];
      }
    }
    for (std::size_t k = 0; k < n; ++k) b[k] /= a[k * n + k];
    return true;
  }

  const Dense& ch_;
  std::vector<double> mult_;
  std::vector<double> q_;
};

// Maximizes I(p) - sum_d s_d E[cost_d] with a certified gap. Two phases:
// safeguarded over-relaxed multiplicative updates identify the support, then
// active-set equalization polishes it; every candidate is re-certified
// against the full grid, and any grid point whose tilted divergence exceeds
// the active set's level gets pulled in. `iterations` counts full passes
// over the transition matrix.
SolveState tilted_ba(const Dense& ch, std::span<const double> multipliers,
                     std::vector<double> p0, double tol, int max_iter,
                     std::vector<IterationTrace>* trace = nullptr) {
  BaEngine engine(ch, multipliers);
  const std::size_t K = ch.inputs;

  SolveState result;
  int evals = 0;
  double last_recorded = -kInf;

  auto record = [&](const PassStats& st) {
    if (trace && st.lagrangian >= last_recorded - 1e-12) {
      trace->push_back({st.info, engine.max_divergence(), st.lagrangian});
      last_recorded = st.lagrangian;
    }
  };
  auto finish = [&](std::vector<double> p, const PassStats& st,
                    bool converged) {
    result.p = std::move(p);
    result.mean_costs = st.mean_costs;
    result.mutual_info = st.info;
    result.lagrangian = st.lagrangian;
    result.cert_upper = st.cert_upper;
    result.gap = st.gap;
    result.iterations = evals;
    result.converged = converged;
    return result;
  };

  std::vector<double> logp(K), logp_next(K), tilt_saved;
  {
    double total = 0.0;
    for (double v : p0) total += v;
    for (std::size_t x = 0; x < K; ++x) {
      logp[x] = p0[x] > 0.0 ? std::log(p0[x] / total) : -kInf;
    }
  }
  auto to_linear = [&](const std::vector<double>& lp) {
    std::vector<double> p(K);
    for (std::size_t x = 0; x < K; ++x) {
      p[x] = lp[x] > -kInf ? std::exp(lp[x]) : 0.0;
    }
    return p;
  };

  std::vector<double> p = to_linear(logp);
  PassStats st = engine.evaluate(p);
  ++evals;
  record(st);
  if (st.gap <= tol) return finish(std::move(p), st, true);

  // Phase 1: over-relaxed updates p' ~ p exp(mu tilt); any mu shares the
  // fixed points, the safeguard keeps the objective nondecreasing, and
  // mu = 1 (plain) always passes it.
  const double phase2_gap = std::max(tol, 1e-3);
  const int phase1_cap = std::min(max_iter, 400);
  double mu = 1.0;
  tilt_saved = engine.tilt();
  while (evals < phase1_cap && st.gap > phase2_gap) {
    double max_l = -kInf;
    for (std::size_t x = 0; x < K; ++x) {
      logp_next[x] =
          logp[x] > -kInf
              ? logp[x] + std::min(mu * tilt_saved[x], kTiltCap)
              : -kInf;
      max_l = std::max(max_l, logp_next[x]);
    }
    double z = 0.0;
    for (std::size_t x = 0; x < K; ++x) {
      if (logp_next[x] > -kInf) z += std::exp(logp_next[x] - max_l);
    }
    const double log_z = max_l + std::log(z);
    for (std::size_t x = 0; x < K; ++x) {
      if (logp_next[x] > -kInf) logp_next[x] -= log_z;
    }
    std::vector<double> p_next = to_linear(logp_next);
    const PassStats st_next = engine.evaluate(p_next);
    ++evals;
    if (st_next.lagrangian >= st.lagrangian - 1e-12) {
      logp.swap(logp_next);
      p = std::move(p_next);
      st = st_next;
      tilt_saved = engine.tilt();
      record(st);
      if (st.gap <= tol) return finish(std::move(p), st, true);
      mu = std::min(mu * 1.5, 1e6);
    } else {
      mu = std::max(1.0, 0.25 * mu);
    }
  }

  // Phase 2: equalize on the identified support, certify globally, grow the
  // active set with the worst violator until the certificate closes.
  ActiveSetSolver active(ch, multipliers);
  active.seed(p, 64);
  PassStats best_st = st;
  std::vector<double> best_p = p;
  int stalls = 0;
  while (evals < max_iter && stalls < 8) {
    active.polish(80);
    std::vector<double> candidate = active.full_distribution(K);
    const PassStats cst = engine.evaluate(candidate);
    ++evals;
#ifdef MOLCAP_SOLVER_DEBUG
    std::fprintf(stderr, "phase2 evals=%d |A|=%zu L=%.12f gap=%.3e\n", evals,
                 active.indices.size(), cst.lagrangian, cst.gap);
#endif
    if (cst.lagrangian >= best_st.lagrangian) {
      best_st = cst;
      best_p = candidate;
      record(cst);
    }
    if (cst.gap <= tol) return finish(std::move(candidate), cst, true);
    if (cst.lagrangian == -kInf) break;  // unusable candidate
    const std::size_t violator = engine.arg_max_tilt();
    if (active.contains(violator)) {
      // Support already holds the worst point: the inner solve is what
      // lags. Shake it and try again.
      active.relax(50);
      ++stalls;
    } else {
      active.add_point(violator);
      stalls = 0;
    }
  }
  return finish(std::move(best_p), best_st, false);
}

std::vector<double> uniform_distribution(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

CapacityResult assemble(const SolveState& st, std::span<const double> mult,
                        std::span<const double> budgets, int total_iterations,
                        bool budgets_ok, std::vector<IterationTrace> trace) {
  CapacityResult result;
  result.capacity = st.mutual_info;
  result.input_distribution = st.p;
  result.mean_costs = st.mean_costs;
  result.mean_cost =
      std::accumulate(st.mean_costs.begin(), st.mean_costs.end(), 0.0);
  result.iterations = total_iterations;
  result.gap = std::max(st.gap, 0.0);
  for (std::size_t d = 0; d < mult.size(); ++d) {
    if (mult[d] != 0.0 && d < budgets.size()) {
      result.dual_slack += mult[d] * (budgets[d] - st.mean_costs[d]);
    }
  }
  result.converged = st.converged && budgets_ok;
  result.trace = std::move(trace);
  return result;
}

SolveState run_solve(const Dense& ch, const std::vector<double>& mult,
                     const std::vector<double>& start, double tol,
                     int max_iter, int& total_iterations,
                     std::vector<IterationTrace>* trace = nullptr) {
  SolveState st = tilted_ba(ch, mult, start, tol, max_iter, trace);
  total_iterations += st.iterations;
  return st;
}

struct CoordinateSearch {
  double lo = 0.0, hi = 0.0;
  std::vector<double> p_lo, p_hi;  // solutions bracketing the budget
  double mean_lo = 0.0, mean_hi = 0.0;
  bool bracketed = false;
};

// Bisection of one multiplier until the corresponding mean cost lands within
// the relative tolerance of its budget. Mean cost is nonincreasing in the
// multiplier; ties at the budget resolve toward the smaller value because the
// search accepts the first midpoint inside the band. Returns false when the
// mean jumps across the budget without entering the band (a capacity-cost
// kink).
bool bisect_coordinate(const Dense& ch, std::vector<double>& mult,
                       std::size_t d, double budget, const SolverOptions& opt,
                       double search_tol, SolveState& st,
                       int& total_iterations, CoordinateSearch& out) {
  const double rel = opt.multiplier_tolerance;
  const double hint = mult[d];

  double lo = 0.0;
  double mean_lo = st.mean_costs[d];
  std::vector<double> p_lo = st.p;
  double hi = hint > 0.0 ? hint : 1e-3;
  for (int grow = 0;; ++grow) {
    if (grow == 200) {
      throw std::runtime_error(
          "blahut_arimoto_constrained: multiplier growth failed");
    }
    mult[d] = hi;
    st = run_solve(ch, mult, st.p, search_tol, opt.max_iterations,
                   total_iterations);
    if (st.mean_costs[d] <= budget) break;
    lo = hi;
    mean_lo = st.mean_costs[d];
    p_lo = st.p;
    hi *= 4.0;
  }
  double mean_hi = st.mean_costs[d];
  std::vector<double> p_hi = st.p;
  if (std::abs(mean_hi - budget) <= rel * budget) return true;

  for (int step = 0; step < 200 && hi - lo > 1e-15 * std::max(1.0, hi);
       ++step) {
    const double mid = 0.5 * (lo + hi);
    mult[d] = mid;
    st = run_solve(ch, mult, st.p, search_tol, opt.max_iterations,
                   total_iterations);
    if (std::abs(st.mean_costs[d] - budget) <= rel * budget) return true;
    if (st.mean_costs[d] > budget) {
      lo = mid;
      mean_lo = st.mean_costs[d];
      p_lo = st.p;
    } else {
      hi = mid;
      mean_hi = st.mean_costs[d];
      p_hi = st.p;
    }
  }
  mult[d] = hi;  // feasible side
  out = CoordinateSearch{lo,      hi,      std::move(p_lo), std::move(p_hi),
                         mean_lo, mean_hi, true};
  return false;
}

CapacityResult solve_constrained(const Dense& ch,
                                 std::span<const double> budgets,
                                 const SolverOptions& opt) {
  const std::size_t dims = ch.cost.size();
  std::vector<double> mult(dims, 0.0);
  int total_iterations = 0;

  // Unconstrained solve; also the answer when every budget is slack.
  std::vector<IterationTrace> trace;
  SolveState st = run_solve(ch, mult, uniform_distribution(ch.inputs),
                            opt.tolerance, opt.max_iterations,
                            total_iterations,
                            opt.record_trace ? &trace : nullptr);
  bool all_slack = true;
  for (std::size_t d = 0; d < dims; ++d) {
    if (st.mean_costs[d] > budgets[d]) all_slack = false;
  }
  if (all_slack) {
    return assemble(st, mult, budgets, total_iterations, st.converged,
                    std::move(trace));
  }

  const double search_tol = std::max(30.0 * opt.tolerance, 1e-6);
  CoordinateSearch kink;
  bool kinked = false;

  // Cyclic coordinate search; symmetric problems settle within two passes.
  for (int pass = 0; pass < 4; ++pass) {
    bool all_ok = true;
    for (std::size_t d = 0; d < dims; ++d) {
      const double budget = budgets[d];
      if (mult[d] == 0.0 && st.mean_costs[d] <= budget) continue;
      if (mult[d] > 0.0 &&
          std::abs(st.mean_costs[d] - budget) <=
              opt.multiplier_tolerance * budget) {
        continue;
      }
      // Re-check with this coordinate released before searching it.
      const double hint = mult[d];
      mult[d] = 0.0;
      st = run_solve(ch, mult, st.p, search_tol, opt.max_iterations,
                     total_iterations);
      if (st.mean_costs[d] <= budget) continue;
      all_ok = false;
      mult[d] = hint;
      if (!bisect_coordinate(ch, mult, d, budget, opt, search_tol, st,
                             total_iterations, kink)) {
        kinked = true;
      }
    }
    if (all_ok && pass > 0) break;
  }

  if (kinked && dims == 1) {
    // Mean cost jumped across the budget: the optimum time-shares the two
    // bracketing solutions. Mix them to meet the budget exactly and certify
    // the mixture.
    const double theta =
        (budgets[0] - kink.mean_hi) / (kink.mean_lo - kink.mean_hi);
    std::vector<double> p(ch.inputs);
    for (std::size_t x = 0; x < ch.inputs; ++x) {
      p[x] = theta * kink.p_lo[x] + (1.0 - theta) * kink.p_hi[x];
    }
    mult[0] = kink.hi;
    BaEngine engine(ch, mult);
    const PassStats mixed_stats = engine.evaluate(p);
    ++total_iterations;
    SolveState mixed;
    mixed.p = std::move(p);
    mixed.mean_costs = mixed_stats.mean_costs;
    mixed.mutual_info = mixed_stats.info;
    mixed.lagrangian = mixed_stats.lagrangian;
    mixed.cert_upper = mixed_stats.cert_upper;
    mixed.gap = mixed_stats.gap;
    mixed.converged = mixed_stats.gap <= opt.tolerance;
    if (opt.record_trace) trace.clear();
    return assemble(mixed, mult, budgets, total_iterations,
                    mixed.mean_costs[0] <=
                        budgets[0] * (1.0 + opt.multiplier_tolerance) + 1e-12,
                    std::move(trace));
  }

  // Final certified solve at the located multipliers.
  if (opt.record_trace) trace.clear();
  st = run_solve(ch, mult, st.p, opt.tolerance, opt.max_iterations,
                 total_iterations, opt.record_trace ? &trace : nullptr);
  bool budgets_ok = true;
  for (std::size_t d = 0; d < dims; ++d) {
    if (st.mean_costs[d] >
        budgets[d] * (1.0 + opt.multiplier_tolerance) + 1e-12) {
      budgets_ok = false;
    }
  }
  return assemble(st, mult, budgets, total_iterations,
                  st.converged && budgets_ok, std::move(trace));
}

// Restriction of the channel to the inputs that keep every exhausted budget
// at its minimum (e.g. a zero budget pins the silent input).
CapacityResult solve_restricted(const DiscreteChannel& channel,
                                const Dense& dense,
                                std::span<const double> budgets,
                                const std::vector<std::size_t>& tight_dims,
                                const SolverOptions& opt) {
  const std::size_t dims = dense.cost.size();
  std::vector<bool> is_tight(dims, false);
  for (std::size_t d : tight_dims) is_tight[d] = true;

  std::vector<std::size_t> keep;
  for (std::size_t x = 0; x < dense.inputs; ++x) {
    bool ok = true;
    for (std::size_t d : tight_dims) {
      if (dense.cost[d][x] != budgets[d]) ok = false;
    }
    if (ok) keep.push_back(x);
  }

  Dense sub;
  sub.inputs = keep.size();
  sub.outputs = dense.outputs;
  sub.axis_sizes = {keep.size()};
  std::vector<double> sub_rows(sub.inputs * sub.outputs);
  std::vector<double> sub_budgets;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    std::copy_n(channel.row(keep[i]), dense.outputs,
                sub_rows.begin() + i * dense.outputs);
  }
  sub.rows = sub_rows.data();
  sub.compute_row_self();
  for (std::size_t d = 0; d < dims; ++d) {
    if (is_tight[d]) continue;
    std::vector<double> c(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) c[i] = dense.cost[d][keep[i]];
    sub.cost.push_back(std::move(c));
    sub_budgets.push_back(budgets[d]);
  }

  CapacityResult inner = solve_constrained(sub, sub_budgets, opt);

  // Scatter back onto the full input list.
  std::vector<double> full(dense.inputs, 0.0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    full[keep[i]] = inner.input_distribution[i];
  }
  inner.input_distribution = std::move(full);
  inner.mean_costs.assign(dims, 0.0);
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t x = 0; x < dense.inputs; ++x) {
      inner.mean_costs[d] += inner.input_distribution[x] * dense.cost[d][x];
    }
  }
  inner.mean_cost =
      std::accumulate(inner.mean_costs.begin(), inner.mean_costs.end(), 0.0);
  return inner;
}

}  // namespace

double mutual_information(std::span<const double> input_dist,
                          const DiscreteChannel& channel) {
  channel.validate();
  const std::size_t K = channel.num_inputs();
  const std::size_t Y = channel.output_size;
  if (input_dist.size() != K) {
    throw std::invalid_argument(
        "mutual_information: distribution does not match the input count");
  }
  double sum = 0.0;
  for (double v : input_dist) {
    if (v < 0.0) {
      throw std::invalid_argument("mutual_information: negative probability");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "mutual_information: distribution must sum to 1");
  }

  std::vector<double> q(Y, 0.0);
  for (std::size_t x = 0; x < K; ++x) {
    if (input_dist[x] == 0.0) continue;
    const double* row = channel.row(x);
    for (std::size_t y = 0; y < Y; ++y) q[y] += input_dist[x] * row[y];
  }
  double info = 0.0;
  for (std::size_t x = 0; x < K; ++x) {
    if (input_dist[x] <= kDeadMass) continue;
    const double* row = channel.row(x);
    double d = 0.0;
    for (std::size_t y = 0; y < Y; ++y) {
      if (row[y] > 0.0) d += row[y] * std::log(row[y] / q[y]);
    }
    info += input_dist[x] * d;
  }
  return info;
}

std::pair<double, double> capacity_certificate(
    std::span<const double> input_dist, const DiscreteChannel& channel) {
  const double lower = mutual_information(input_dist, channel);
  const std::size_t K = channel.num_inputs();
  const std::size_t Y = channel.output_size;
  std::vector<double> q(Y, 0.0);
  for (std::size_t x = 0; x < K; ++x) {
    if (input_dist[x] == 0.0) continue;
    const double* row = channel.row(x);
    for (std::size_t y = 0; y < Y; ++y) q[y] += input_dist[x] * row[y];
  }
  double upper = -kInf;
  for (std::size_t x = 0; x < K; ++x) {
    const double* row = channel.row(x);
    double d = 0.0;
    for (std::size_t y = 0; y < Y; ++y) {
      if (row[y] > 0.0) {
        d = q[y] > 0.0 ? d + row[y] * std::log(row[y] / q[y]) : kInf;
        if (d == kInf) break;
      }
    }
    upper = std::max(upper, d);
  }
  return {lower, upper};
}

CapacityResult blahut_arimoto(const DiscreteChannel& channel,
                              const SolverOptions& options) {
  channel.validate();
  Dense dense(channel);
  std::vector<IterationTrace> trace;
  const std::vector<double> no_multipliers(dense.cost.size(), 0.0);
  SolveState st =
      tilted_ba(dense, no_multipliers, uniform_distribution(dense.inputs),
                options.tolerance, options.max_iterations,
                options.record_trace ? &trace : nullptr);
  return assemble(st, {}, {}, st.iterations, st.converged, std::move(trace));
}

CapacityResult blahut_arimoto_constrained(const DiscreteChannel& channel,
                                          std::span<const double> budgets,
                                          const SolverOptions& options) {
  channel.validate();
  if (budgets.size() != channel.dims()) {
    throw std::invalid_argument(
        "blahut_arimoto_constrained: one budget per input dimension required");
  }
  Dense dense(channel);

  std::vector<std::size_t> tight_dims;
  for (std::size_t d = 0; d < budgets.size(); ++d) {
    const double cmin =
        *std::min_element(dense.cost[d].begin(), dense.cost[d].end());
    if (budgets[d] < cmin) {
      throw std::domain_error(
          "blahut_arimoto_constrained: budget " + std::to_string(budgets[d]) +
          " is below the minimum input cost " + std::to_string(cmin));
    }
    if (budgets[d] == cmin) tight_dims.push_back(d);
  }
  if (!tight_dims.empty()) {
    return solve_restricted(channel, dense, budgets, tight_dims, options);
  }
  return solve_constrained(dense, budgets, options);
}

CapacityResult blahut_arimoto_constrained(const DiscreteChannel& channel,
                                          double budget,
                                          const SolverOptions& options) {
  if (channel.dims() != 1) {
    throw std::invalid_argument(
        "blahut_arimoto_constrained: scalar budget needs a one-dimensional "
        "input grid");
  }
  const double budgets[1] = {budget};
  return blahut_arimoto_constrained(channel, std::span<const double>(budgets),
                                    options);
}

}  // namespace molcap
