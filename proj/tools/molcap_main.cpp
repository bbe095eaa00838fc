// Command-line front end for the ligand-receptor channel capacity library.
//
// Subcommands:
//   capacity   level/type scenario capacity via Blahut-Arimoto
//   blocking   joint type-scenario capacity with cross-type blocking
//   bound      closed-form bounds (upper | lower | asymptotic)
//   sweep      parameter sweeps to CSV (figure presets or a spec file)
//   validate   solver oracle suite
//
// Exit codes: 0 success, 1 domain/configuration error, 2 solver
// non-convergence.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "molcap/bounds.hpp"
#include "molcap/channel.hpp"
#include "molcap/csv.hpp"
#include "molcap/ligand.hpp"
#include "molcap/scenarios.hpp"
#include "molcap/solver.hpp"

namespace {

using namespace molcap;

struct Units {
  bool bits = false;
  double convert(double nats) const {
    return bits ? nats / std::log(2.0) : nats;
  }
  const char* name() const { return bits ? "bits" : "nats"; }
};

struct CommonFlags {
  int n = 16;
  int N = 5;
  int m = 1;
  double gamma = 0.0004;
  double kappa = 0.1;
  double gamma_block = 0.0005;
  double kappa_block = 0.01;
  double peak = 80.0;
  std::optional<double> alpha;
  double noise = 0.0;
  int grid_points = 201;
  int grid_per_dim = 41;
  double tol = 1e-7;
  int max_iter = 50000;
  std::string units = "nats";

  ScenarioConfig config() const {
    ScenarioConfig c;
    c.bacteria = n;
    c.receptors = N;
    c.types = m;
    c.peak = peak;
    c.budget = alpha.value_or(peak);  // no flag means a slack budget
    c.noise = noise;
    return c;
  }
  LigandParams ligand() const { return {gamma, kappa}; }
  BlockingParams blocking() const {
    BlockingParams p;
    p.colonies.assign(m, ColonyRates{{gamma, kappa}, {gamma_block, kappa_block}});
    return p;
  }
  SolverOptions solver() const {
    SolverOptions o;
    o.tolerance = tol;
    o.max_iterations = max_iter;
    return o;
  }
  Units units_flag() const { return Units{units == "bits"}; }
};

void add_rate_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--gamma", f.gamma, "association rate");
  cmd->add_option("--kappa", f.kappa, "dissociation rate");
}

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--n", f.n, "bacteria count");
  cmd->add_option("--N", f.N, "receptors per bacterium");
  add_rate_flags(cmd, f);
  cmd->add_option("--As", f.peak, "peak concentration");
  cmd->add_option("--Ane", f.noise, "ambient noise concentration");
}

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--grid-points", f.grid_points, "input grid size");
  cmd->add_option("--tol", f.tol, "certificate gap target, nats");
  cmd->add_option("--max-iter", f.max_iter, "iteration cap per solve");
}

void add_units_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--units", f.units, "nats or bits")
      ->check(CLI::IsMember({"nats", "bits"}));
}

int report_result(const CapacityResult& result, const Units& units) {
  std::cout << "capacity " << format_number(units.convert(result.capacity))
            << ' ' << units.name() << '\n'
            << "mean_cost " << format_number(result.mean_cost) << '\n'
            << "iterations " << result.iterations << '\n'
            << "gap " << format_number(units.convert(result.gap)) << ' '
            << units.name() << '\n'
            << "converged " << (result.converged ? "yes" : "no") << '\n';
  return result.converged ? 0 : 2;
}

int run_capacity(const CommonFlags& flags) {
  const ScenarioConfig config = flags.config();
  const CapacityResult result =
      flags.m == 1
          ? ls_capacity(config, flags.ligand(), flags.solver(),
                        flags.grid_points)
          : ts_capacity(config, flags.ligand(), flags.solver(),
                        flags.grid_points);
  return report_result(result, flags.units_flag());
}

int run_blocking(const CommonFlags& flags,
                 const std::optional<double>& per_type_peak) {
  BlockingOptions opts;
  opts.per_type_peak = per_type_peak;
  const CapacityResult result =
      ts_blocking_capacity(flags.config(), flags.blocking(), flags.solver(),
                           flags.grid_per_dim, opts);
  return report_result(result, flags.units_flag());
}

int run_bound(const std::string& kind, const CommonFlags& flags) {
  const Units units = flags.units_flag();
  if (kind == "upper") {
    BoundInputs in;
    in.receptor_count = flags.n * flags.N;
    in.peak = flags.peak;
    in.budget = flags.alpha.value_or(flags.peak);
    in.noise = flags.noise;
    in.rates = flags.ligand();
    const KlUpperBound bound = kl_upper_bound(in);
    std::cout << "upper_bound " << format_number(units.convert(bound.nats))
              << ' ' << units.name();
    if (bound.vacuous) std::cout << " (vacuous at zero noise)";
    std::cout << '\n';
    return 0;
  }
  if (kind == "lower") {
    const BinaryLowerBound bound =
        binary_lower_bound(flags.peak, flags.n * flags.N, flags.ligand());
    std::cout << "lower_bound " << format_number(units.convert(bound.nats))
              << ' ' << units.name() << '\n'
              << "weight_on_zero " << format_number(bound.weight_on_zero)
              << '\n';
    return 0;
  }
  const double value = asymptotic_capacity(flags.n);
  if (flags.n < 17) {
    std::cerr << "note: the formula is asymptotic in n; n=" << flags.n
              << " is far below its regime\n";
  }
  std::cout << "asymptotic_capacity " << format_number(units.convert(value))
            << ' ' << units.name() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// sweeps

std::vector<double> range_values(double from, double to, double step) {
  std::vector<double> values;
  for (double v = from; v <= to + 1e-9; v += step) values.push_back(v);
  return values;
}

BlockingParams paper_blocking_rates(int types) {
  BlockingParams p;
  p.colonies.assign(types, ColonyRates{{0.0004, 0.1}, {0.0005, 0.01}});
  return p;
}

SweepSpec preset_spec(const std::string& name) {
  SweepSpec spec;
  spec.base.bacteria = 16;
  spec.base.receptors = 5;
  spec.base.noise = 0.0;
  spec.ligand = {0.0004, 0.1};
  if (name == "fig7" || name == "fig10") {
    spec.varying = SweepParameter::peak;
    spec.values = range_values(10.0, 160.0, 10.0);
    spec.base.noise = name == "fig10" ? 5.0 : 0.0;
    spec.ts_types = {2, 4, 8, 16};
  } else if (name == "fig9") {
    spec.varying = SweepParameter::noise;
    spec.values = range_values(1.0, 20.0, 1.0);
    spec.base.peak = 80.0;
    spec.include_upper = true;
  } else if (name == "fig22") {
    spec.varying = SweepParameter::peak;
    spec.values = range_values(2.0, 80.0, 2.0);
    spec.base.bacteria = 4;
    spec.include_lower = true;
    spec.ls_budget.fraction = 1.0;  // no average constraint
  } else if (name == "fig24") {
    spec.varying = SweepParameter::peak;
    spec.values = {20.0, 40.0, 80.0, 120.0, 160.0};
    spec.base.types = 2;
    spec.ts_types = {2};
    spec.include_blocking = true;
    spec.blocking_rates = paper_blocking_rates(2);
  } else {
    throw std::domain_error("unknown preset: " + name);
  }
  return spec;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

// Plain key = value lines, '#' starts a comment; keys mirror the CLI flags.
SweepSpec parse_spec_file(const std::string& path, std::string& out_path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open spec file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw std::domain_error(path + ":" + std::to_string(line_no) +
                                ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  SweepSpec spec;
  spec.ligand = {0.0004, 0.1};
  double gamma_block = 0.0005, kappa_block = 0.01;
  for (const auto& [key, value] : kv) {
    if (key == "vary") {
      if (value == "As") spec.varying = SweepParameter::peak;
      else if (value == "Ane") spec.varying = SweepParameter::noise;
      else if (value == "m") spec.varying = SweepParameter::types;
      else throw std::domain_error("vary must be As, Ane or m");
    } else if (key == "values") {
      spec.values = parse_list(value);
    } else if (key == "n") {
      spec.base.bacteria = std::stoi(value);
    } else if (key == "N") {
      spec.base.receptors = std::stoi(value);
    } else if (key == "m") {
      spec.base.types = std::stoi(value);
    } else if (key == "gamma") {
      spec.ligand.gamma = std::stod(value);
    } else if (key == "kappa") {
      spec.ligand.kappa = std::stod(value);
    } else if (key == "gamma-block") {
      gamma_block = std::stod(value);
    } else if (key == "kappa-block") {
      kappa_block = std::stod(value);
    } else if (key == "As") {
      spec.base.peak = std::stod(value);
    } else if (key == "Ane") {
      spec.base.noise = std::stod(value);
    } else if (key == "alpha") {
      spec.ls_budget.value = std::stod(value);
    } else if (key == "alpha-frac") {
      spec.ls_budget.fraction = std::stod(value);
    } else if (key == "alpha-ts") {
      spec.ts_budget.value = std::stod(value);
    } else if (key == "alpha-ts-frac") {
      spec.ts_budget.fraction = std::stod(value);
    } else if (key == "ls") {
      spec.include_ls = value != "0";
    } else if (key == "ts-m") {
      spec.ts_types.clear();
      for (double m : parse_list(value)) {
        spec.ts_types.push_back(static_cast<int>(m));
      }
    } else if (key == "bounds") {
      spec.include_upper = value == "upper" || value == "both";
      spec.include_lower = value == "lower" || value == "both";
    } else if (key == "blocking") {
      spec.include_blocking = value != "0";
    } else if (key == "grid-points") {
      spec.grid_points = std::stoi(value);
    } else if (key == "grid-per-dim") {
      spec.blocking_grid = std::stoi(value);
    } else if (key == "tol") {
      spec.solver.tolerance = std::stod(value);
    } else if (key == "max-iter") {
      spec.solver.max_iterations = std::stoi(value);
    } else if (key == "per-type-peak") {
      spec.per_type_peak = std::stod(value);
    } else if (key == "out") {
      out_path = value;
    } else {
      throw std::domain_error("unknown spec key: " + key);
    }
  }
  if (spec.include_blocking) {
    spec.blocking_rates = BlockingParams{};
    spec.blocking_rates->colonies.assign(
        spec.base.types,
        ColonyRates{spec.ligand, {gamma_block, kappa_block}});
  }
  return spec;
}

int run_sweep_command(const std::string& preset, const std::string& spec_path,
                      std::string out_path) {
  SweepSpec spec;
  if (!preset.empty()) {
    spec = preset_spec(preset);
    if (out_path.empty()) out_path = preset + ".csv";
  } else {
    std::string from_file;
    spec = parse_spec_file(spec_path, from_file);
    if (out_path.empty()) out_path = from_file.empty() ? "sweep.csv" : from_file;
  }
  const SweepTable table = run_sweep(spec);
  write_csv(table, out_path);
  bool all_converged = true;
  for (const auto& row : table.rows) {
    if (!row.error.empty()) {
      std::cerr << "row " << format_number(row.parameter) << ": " << row.error
                << '\n';
    }
    all_converged = all_converged && row.converged;
  }
  std::cout << "wrote " << table.rows.size() << " rows to " << out_path
            << '\n';
  return all_converged ? 0 : 2;
}

// ---------------------------------------------------------------------------
// oracle suite

struct Check {
  std::string name;
  double error;
  double tolerance;
  bool passed() const { return error <= tolerance; }
};

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

std::array<double, 3> chain_steady_state(double a, double b, double ko,
                                         double kb) {
  // pi^T Q = 0 for the empty/full/blocked generator, normalized; solved by
  // elimination on the 3x3 system.
  double m[3][4] = {
      {-(a + b), ko, kb, 0.0},
      {a, -ko, 0.0, 0.0},
      {1.0, 1.0, 1.0, 1.0},
  };
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    std::swap(m[col], m[pivot]);
    for (int row = 0; row < 3; ++row) {
      if (row == col) continue;
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

int run_validate() {
  std::vector<Check> checks;
  SolverOptions opts;
  opts.tolerance = 1e-9;

  {
    DiscreteChannel ch;
    ch.axes = {{0.0, 1.0}};
    ch.costs = ch.axes;
    ch.output_size = 2;
    ch.transition = {0.9, 0.1, 0.1, 0.9};
    const double expected = std::log(2.0) - binary_entropy(0.1);
    checks.push_back({"bsc-closed-form",
                      std::abs(blahut_arimoto(ch, opts).capacity - expected),
                      1e-6});
  }
  {
    const double p = 0.3, q = 0.7;
    DiscreteChannel ch;
    ch.axes = {{0.0, 1.0}};
    ch.costs = ch.axes;
    ch.output_size = 2;
    ch.transition = {1.0, 0.0, q, p};
    const double expected = std::log1p(p * std::pow(q, q / p));
    checks.push_back({"z-channel-closed-form",
                      std::abs(blahut_arimoto(ch, opts).capacity - expected),
                      1e-6});
  }
  {
    double worst = 0.0;
    const LigandParams rates{0.0004, 0.1};
    for (const auto& [n, peak] : std::vector<std::pair<int, double>>{
             {4, 10.0}, {16, 80.0}}) {
      ScenarioConfig config;
      config.bacteria = n;
      config.peak = peak;
      config.budget = peak;
      const auto ch = build_channel(config, rates, 2);
      const auto ba = blahut_arimoto_constrained(ch, peak, opts);
      const auto bound = binary_lower_bound(peak, n * 5, rates);
      worst = std::max(worst, std::abs(ba.capacity - bound.nats));
    }
    checks.push_back({"binary-grid-vs-lemma", worst, 1e-6});
  }
  {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> rate(0.001, 2.0);
    std::uniform_real_distribution<double> conc(0.0, 150.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const ColonyRates r{{rate(rng), rate(rng)}, {rate(rng), rate(rng)}};
      const double x = conc(rng), xo = conc(rng);
      const auto pi = chain_steady_state(r.own.gamma * x, r.block.gamma * xo,
                                         r.own.kappa, r.block.kappa);
      const std::vector<double> others{xo};
      const ReceptorState probs = blocking_probs(x, others, r);
      worst = std::max({worst, std::abs(probs.empty - pi[0]),
                        std::abs(probs.full - pi[1]),
                        std::abs(probs.block - pi[2])});
    }
    checks.push_back({"markov-steady-state", worst, 1e-10});
  }

  bool all = true;
  for (const Check& check : checks) {
    std::cout << (check.passed() ? "ok   " : "FAIL ") << check.name
              << "  |err| " << format_number(check.error) << "  tol "
              << format_number(check.tolerance) << '\n';
    all = all && check.passed();
  }
  std::cout << (all ? "validate: all checks passed"
                    : "validate: FAILURES present")
            << '\n';
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ligand-receptor molecular communication capacity toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::optional<double> per_type_peak;
  std::string bound_kind, preset, spec_path, out_path;

  CLI::App* capacity = app.add_subcommand(
      "capacity", "level/type scenario capacity via Blahut-Arimoto");
  add_model_flags(capacity, flags);
  capacity->add_option("--m", flags.m, "molecule types (1 = level scenario)");
  capacity->add_option("--alpha", flags.alpha, "average budget (default: peak)");
  add_solver_flags(capacity, flags);
  add_units_flag(capacity, flags);

  CLI::App* blocking = app.add_subcommand(
      "blocking", "type scenario capacity with cross-type blocking");
  add_model_flags(blocking, flags);
  blocking->add_option("--m", flags.m, "molecule types")->default_val(2);
  blocking->add_option("--alpha", flags.alpha, "total average budget");
  blocking->add_option("--gamma-block", flags.gamma_block, "blocking rate");
  blocking->add_option("--kappa-block", flags.kappa_block, "unblocking rate");
  blocking->add_option("--grid-per-dim", flags.grid_per_dim,
                       "grid points per molecule type");
  blocking->add_option("--per-type-peak", per_type_peak,
                       "per-type peak override (default: As/m)");
  add_solver_flags(blocking, flags);
  add_units_flag(blocking, flags);

  CLI::App* bound =
      app.add_subcommand("bound", "closed-form capacity bounds");
  bound->add_option("kind", bound_kind, "upper | lower | asymptotic")
      ->required()
      ->check(CLI::IsMember({"upper", "lower", "asymptotic"}));
  add_model_flags(bound, flags);
  bound->add_option("--alpha", flags.alpha, "average budget (upper bound)");
  add_units_flag(bound, flags);

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  CLI::Option* preset_opt = sweep->add_option(
      "--preset", preset, "fig7 | fig10 | fig9 | fig22 | fig24");
  CLI::Option* spec_opt =
      sweep->add_option("--spec", spec_path, "key = value sweep file");
  preset_opt->excludes(spec_opt);
  sweep->add_option("--out", out_path, "output CSV path");

  app.add_subcommand("validate", "run the solver oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("capacity")) return run_capacity(flags);
    if (app.got_subcommand("blocking")) return run_blocking(flags, per_type_peak);
    if (app.got_subcommand("bound")) return run_bound(bound_kind, flags);
    if (app.got_subcommand("sweep")) {
      if (preset.empty() && spec_path.empty()) {
        std::cerr << "sweep: either --preset or --spec is required\n";
        return 1;
      }
      return run_sweep_command(preset, spec_path, out_path);
    }
    if (app.got_subcommand("validate")) return run_validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
