#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nkgroup/error.hpp"
#include "nkgroup/exact_oracle.hpp"
#include "nkgroup/experiment.hpp"
#include "nkgroup/io.hpp"
#include "nkgroup/meanfield.hpp"

namespace fs = std::filesystem;
using namespace nkgroup;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

// Flags that mirror config fields. Unset flags leave the file (or default) value.
struct Overrides {
  std::string config;
  std::optional<int> members, decisions, k, realizations, grid_points;
  std::optional<double> p, beta_j, beta_prime, t_end, window, tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy, output;
  std::optional<int> workers;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "JSON config file");
    app->add_option("--M", members, "group size");
    app->add_option("--N", decisions, "number of decisions");
    app->add_option("--K", k, "epistatic interactions per decision");
    app->add_option("--p", p, "competence density");
    app->add_option("--betaJ", beta_j, "social coupling");
    app->add_option("--betaPrime", beta_prime, "payoff coupling");
    app->add_option("--realizations", realizations, "ensemble size");
    app->add_option("--t-end", t_end, "simulated time per realization");
    app->add_option("--grid-points", grid_points, "sample grid size");
    app->add_option("--window", window, "steady-state window length T");
    app->add_option("--tol", tol, "steady-state tolerance");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--landscape-policy", policy, "per_realization or shared");
    app->add_option("-o,--output", output, "output directory");
    app->add_option("--workers", workers, "worker threads (default: NKGROUP_WORKERS or all cores)");
  }

  ExperimentConfig resolve(ExperimentConfig cfg) const {
    if (!config.empty()) cfg = load_config(config);
    if (members) cfg.members = *members;
    if (decisions) cfg.decisions = *decisions;
    if (k) cfg.k = *k;
    if (p) cfg.p = *p;
    if (beta_j) cfg.beta_j = *beta_j;
    if (beta_prime) cfg.beta_prime = *beta_prime;
    if (realizations) cfg.realizations = *realizations;
    if (t_end) cfg.t_end = *t_end;
    if (grid_points) cfg.grid_points = *grid_points;
    if (window) cfg.steady_window = *window;
    if (tol) cfg.steady_tol = *tol;
    if (seed) cfg.master_seed = *seed;
    if (policy) cfg.landscape_policy = parse_landscape_policy(*policy);
    if (output) cfg.output_dir = *output;
    return cfg;
  }

  RunOptions run_options() const { return {workers.value_or(0), nullptr}; }
};

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("sweep value '" + item + "' is not a number");
    }
  }
  require(!out.empty(), "--values needs at least one number");
  return out;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

fs::path prepare(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  open_out(dir, "config.json") << to_json(cfg).dump(2) << '\n';
  return dir;
}

void describe(std::ostream& out, const ExperimentConfig& cfg) {
  out << "M=" << cfg.members << " N=" << cfg.decisions << " K=" << cfg.k
      << " p=" << format_real(cfg.p) << " betaJ=" << format_real(cfg.beta_j)
      << " betaPrime=" << format_real(cfg.beta_prime) << '\n'
      << "realizations=" << cfg.realizations << " t_end=" << format_real(cfg.t_end)
      << " grid_points=" << cfg.grid_points << " T=" << format_real(cfg.steady_window)
      << " tol=" << format_real(cfg.steady_tol) << '\n'
      << "master_seed=" << cfg.master_seed
      << " landscape_policy=" << to_string(cfg.landscape_policy)
      << " network=" << (cfg.layers.empty() ? "complete" : "custom") << '\n';
}

void describe(std::ostream& out, const char* label, const SteadyEstimate& e) {
  out << label << " = " << format_real(e.value) << " +- " << format_real(e.std_error)
      << (e.converged ? " (converged at t=" + format_real(e.t_reached) + ")"
                      : " (NOT converged by t=" + format_real(e.t_reached) + ")")
      << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int do_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
             const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = prepare(cfg);
  const SweepResult result = sweep(cfg, axis, values, options);
  {
    auto out = open_out(dir, "sweep.csv");
    write_sweep_csv(out, result);
  }
  for (std::size_t i = 0; i < result.curves.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "curves_%03zu.csv", i);
    auto out = open_out(dir, name);
    write_curves_csv(out, result.curves[i]);
  }
  {
    auto out = open_out(dir, "curves.csv");
    write_curves_csv(out, result.curves.front());
  }

  auto report = open_out(dir, "report.txt");
  report << "sweep over " << to_string(axis) << " (" << values.size() << " points)\n";
  describe(report, cfg);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    report << "\n" << to_string(axis) << " = " << format_real(row.axis_value)
           << " (M betaJ = " << format_real(row.m_beta_j) << ", curves_";
    char idx[8];
    std::snprintf(idx, sizeof idx, "%03zu", i);
    report << idx << ".csv)\n";
    describe(report, "  fitness/V_max", row.fitness);
    describe(report, "  consensus    ", row.consensus);
  }
  if (result.rows.size() >= 4 && (axis == SweepAxis::m || axis == SweepAxis::beta_j)) {
    std::vector<double> x, c;
    for (const auto& row : result.rows) {
      x.push_back(row.m_beta_j);
      c.push_back(row.consensus.value);
    }
    try {
      const auto fit = fit_transition(x, c);
      report << "\nconsensus transition vs M betaJ: center " << format_real(fit.center)
             << ", width " << format_real(fit.width) << ", max slope "
             << format_real(fit.max_slope) << " (mean-field critical point 1)\n";
    } catch (const ParameterError&) {
      // all points at one M betaJ; nothing to fit
    }
  }
  std::cout << "wrote " << dir.string() << " in " << format_real(seconds_since(start)) << " s\n";
  return 0;
}

int do_run(const ExperimentConfig& cfg, const Overrides& flags, bool trajectories) {
  validate_config(cfg);
  if (cfg.sweep) return do_sweep(cfg, cfg.sweep->axis, cfg.sweep->values, flags.run_options());

  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = prepare(cfg);
  std::vector<TrajectoryRecord> records;
  RunOptions options = flags.run_options();
  if (trajectories) options.records = &records;
  const EnsembleResult result = run_ensemble(cfg, options);

  {
    auto out = open_out(dir, "curves.csv");
    write_curves_csv(out, result.curves);
  }
  {
    SweepResult single;
    single.axis = SweepAxis::beta_j;
    single.rows.push_back(result.row);
    auto out = open_out(dir, "sweep.csv");
    write_sweep_csv(out, single);
  }
  if (trajectories) {
    auto out = open_out(dir, "trajectories.csv");
    write_trajectory_csv_header(out);
    for (std::size_t r = 0; r < records.size(); ++r) {
      write_trajectory_csv_rows(out, records[r], static_cast<int>(r));
    }
  }

  auto report = open_out(dir, "report.txt");
  report << "ensemble run\n";
  describe(report, cfg);
  report << '\n';
  describe(report, "fitness/V_max", result.row.fitness);
  describe(report, "consensus    ", result.row.consensus);
  report << "mean-field critical betaJ = 1/M = " << format_real(critical_coupling(cfg.members))
         << "; this run has M betaJ = " << format_real(result.row.m_beta_j) << '\n';
  std::cout << "wrote " << dir.string() << " in " << format_real(seconds_since(start)) << " s\n";
  return 0;
}

int do_validate(const ExperimentConfig& cfg, std::uint64_t events, double perturb) {
  validate_config(cfg);
  const fs::path dir = prepare(cfg);
  ValidationOptions options;
  options.min_events = events;
  options.rate_perturbation = perturb;
  const ValidationReport report = validate(cfg, options);

  {
    auto out = open_out(dir, "stationary.csv");
    write_stationary_csv(out, report.stationary);
  }
  const auto seeds = realization_seeds(cfg.master_seed, 0, cfg.landscape_policy);
  nlohmann::json instance = {
      {"landscape", to_json(generate_landscape(cfg.decisions, cfg.k, seeds.landscape))},
      {"competence",
       to_json(generate_competence(cfg.members, cfg.decisions, cfg.p, seeds.competence))},
      {"network", to_json(build_network(cfg))}};
  open_out(dir, "instance.json") << instance.dump(2) << '\n';

  auto out = open_out(dir, "report.txt");
  out << "exact validation\n";
  describe(out, cfg);
  out << '\n';
  write_validation_report(out, report);
  write_validation_report(std::cout, report);
  return report.passed() ? 0 : kExitValidation;
}

int do_meanfield(double x_min, double x_max, int points, std::optional<double> m0, double t_end,
                 const std::string& output) {
  require(points >= 2, "--points must be at least 2");
  require(x_min >= 0.0 && x_max > x_min, "need 0 <= x-min < x-max");
  std::ostringstream csv;
  if (m0) {
    csv << "x,t,m\n";
    for (int i = 0; i < points; ++i) {
      const double x = x_min + (x_max - x_min) * i / (points - 1);
      const auto curve = integrate_mean_field(*m0, x, t_end);
      for (std::size_t s = 0; s < curve.time.size(); s += 100) {
        csv << format_real(x) << ',' << format_real(curve.time[s]) << ','
            << format_real(curve.magnetization[s]) << '\n';
      }
    }
  } else {
    csv << "x,m_star,consensus_star,stability_zero\n";
    for (int i = 0; i < points; ++i) {
      const double x = x_min + (x_max - x_min) * i / (points - 1);
      const auto sol = magnetization_fixed_points(x);
      const double m = spontaneous_magnetization(x);
      Stability zero = Stability::stable;
      for (const auto& fp : sol.fixed_points) {
        if (fp.magnetization == 0.0) zero = fp.stability;
      }
      csv << format_real(x) << ',' << format_real(m) << ',' << format_real(m * m) << ','
          << to_string(zero) << '\n';
    }
  }
  if (output.empty()) {
    std::cout << csv.str();
  } else {
    fs::create_directories(output);
    open_out(output, "meanfield.csv") << csv.str();
    std::cout << "wrote " << output << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group decision dynamics on NK landscapes"};
  app.require_subcommand(1);

  Overrides run_flags;
  bool trajectories = false;
  auto* run = app.add_subcommand("run", "one ensemble (or the sweep listed in the config)");
  run_flags.attach(run);
  run->add_flag("--trajectories", trajectories, "also write every sampled trajectory");

  Overrides sweep_flags;
  std::string axis_name;
  std::string values_text;
  auto* sw = app.add_subcommand("sweep", "one ensemble per value of a parameter");
  sweep_flags.attach(sw);
  sw->add_option("--axis", axis_name, "betaJ, p, K or M");
  sw->add_option("--values", values_text, "comma-separated values");

  Overrides val_flags;
  std::uint64_t events = 1'000'000;
  double perturb = 0.0;
  auto* val = app.add_subcommand("validate", "exact checks on a tiny instance (M*N <= 16)");
  val_flags.attach(val);
  val->add_option("--events", events, "events in the occupancy check");
  val->add_option("--perturb-rate", perturb, "scale one rate by (1 + value); a self-test");

  double x_min = 0.0, x_max = 3.0, t_end = 50.0;
  int points = 61;
  std::optional<double> m0;
  std::string mf_output;
  auto* mf = app.add_subcommand("meanfield", "fixed points m* of m = tanh(x m), x = M betaJ");
  mf->add_option("--x-min", x_min);
  mf->add_option("--x-max", x_max);
  mf->add_option("--points", points);
  mf->add_option("--m0", m0, "integrate dm/dt = -m + tanh(x m) from m0 instead");
  mf->add_option("--t-end", t_end, "integration horizon with --m0");
  mf->add_option("-o,--output", mf_output, "directory for meanfield.csv (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return do_run(run_flags.resolve({}), run_flags, trajectories);
    if (*sw) {
      ExperimentConfig cfg = sweep_flags.resolve({});
      SweepAxis axis;
      std::vector<double> values;
      if (!axis_name.empty() || !values_text.empty()) {
        require(!axis_name.empty() && !values_text.empty(), "--axis and --values go together");
        axis = parse_sweep_axis(axis_name);
        values = parse_values(values_text);
      } else {
        require(cfg.sweep.has_value(), "no sweep given: pass --axis and --values");
        axis = cfg.sweep->axis;
        values = cfg.sweep->values;
      }
      cfg.sweep = SweepSpec{axis, values};
      validate_config(cfg);
      return do_sweep(cfg, axis, values, sweep_flags.run_options());
    }
    if (*val) {
      ExperimentConfig tiny;
      tiny.members = 2;
      tiny.decisions = 2;
      tiny.k = 1;
      tiny.output_dir = "validation";
      return do_validate(val_flags.resolve(tiny), events, perturb);
    }
    return do_meanfield(x_min, x_max, points, m0, t_end, mf_output);
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
