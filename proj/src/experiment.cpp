#include "nkgroup/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "nkgroup/error.hpp"
#include "nkgroup/exact_oracle.hpp"
#include "nkgroup/io.hpp"

namespace nkgroup {

using nlohmann::json;

const char* to_string(LandscapePolicy policy) {
  return policy == LandscapePolicy::shared ? "shared" : "per_realization";
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::beta_j:
      return "betaJ";
    case SweepAxis::p:
      return "p";
    case SweepAxis::k:
      return "K";
    case SweepAxis::m:
      return "M";
  }
  return "unknown";
}

LandscapePolicy parse_landscape_policy(const std::string& text) {
  if (text == "per_realization") return LandscapePolicy::per_realization;
  if (text == "shared") return LandscapePolicy::shared;
  throw ParameterError("landscape_policy must be 'per_realization' or 'shared', got '" + text +
                       "'");
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "betaJ") return SweepAxis::beta_j;
  if (text == "p") return SweepAxis::p;
  if (text == "K") return SweepAxis::k;
  if (text == "M") return SweepAxis::m;
  throw ParameterError("sweep axis must be one of betaJ, p, K, M; got '" + text + "'");
}

void validate_config(const ExperimentConfig& cfg) {
  require(cfg.members >= 2, "M must be at least 2");
  require(cfg.decisions >= 1 && cfg.decisions <= kMaxEnumerableDecisions,
          "N must lie in [1, 24] so that V_max can be enumerated");
  require(cfg.k >= 0 && cfg.k <= cfg.decisions - 1, "K must lie in [0, N-1]");
  require(cfg.p >= 0.0 && cfg.p <= 1.0, "p must lie in [0, 1]");
  require(std::isfinite(cfg.beta_j) && cfg.beta_j >= 0.0, "betaJ must be finite and >= 0");
  require(cfg.beta_prime >= 0.0 && cfg.beta_prime <= kMaxBetaPrime,
          "betaPrime must lie in [0, 100]");
  require(cfg.realizations >= 1, "realizations must be positive");
  require(std::isfinite(cfg.t_end) && cfg.t_end > 0.0, "t_end must be positive");
  require(cfg.grid_points >= 2, "grid_points must be at least 2");
  require(cfg.steady_window > 0.0, "steady_state.T must be positive");
  require(cfg.steady_tol > 0.0, "steady_state.tol must be positive");
  require(cfg.t_end >= 2.0 * cfg.steady_window, "t_end must cover at least two windows of length T");
  require(cfg.layers.empty() || static_cast<int>(cfg.layers.size()) == cfg.decisions,
          "network must list one layer per decision");
  if (!cfg.layers.empty()) Multiplex(cfg.members, cfg.layers);
  if (cfg.sweep) {
    require(!cfg.sweep->values.empty(), "sweep needs at least one value");
    for (double v : cfg.sweep->values) {
      auto point = with_axis_value(cfg, cfg.sweep->axis, v);
      point.sweep.reset();
      validate_config(point);
    }
  }
}

json to_json(const ExperimentConfig& cfg) {
  json j = {{"M", cfg.members},
            {"N", cfg.decisions},
            {"K", cfg.k},
            {"p", cfg.p},
            {"betaJ", cfg.beta_j},
            {"betaPrime", cfg.beta_prime},
            {"realizations", cfg.realizations},
            {"t_end", cfg.t_end},
            {"grid_points", cfg.grid_points},
            {"steady_state", {{"T", cfg.steady_window}, {"tol", cfg.steady_tol}}},
            {"master_seed", cfg.master_seed},
            {"landscape_policy", to_string(cfg.landscape_policy)},
            {"output_dir", cfg.output_dir}};
  if (cfg.layers.empty()) {
    j["network"] = "complete";
  } else {
    json layers = json::array();
    for (const auto& layer : cfg.layers) {
      json edges = json::array();
      for (auto [a, b] : layer) edges.push_back({a, b});
      layers.push_back(std::move(edges));
    }
    j["network"] = {{"layers", std::move(layers)}};
  }
  if (cfg.sweep) {
    j["sweep"] = {{"axis", to_string(cfg.sweep->axis)}, {"values", cfg.sweep->values}};
  }
  return j;
}

namespace {

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ParameterError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "M") {
      cfg.members = get_as<int>(value, key);
    } else if (key == "N") {
      cfg.decisions = get_as<int>(value, key);
    } else if (key == "K") {
      cfg.k = get_as<int>(value, key);
    } else if (key == "p") {
      cfg.p = get_as<double>(value, key);
    } else if (key == "betaJ") {
      if (value.is_array()) {
        SweepSpec spec{SweepAxis::beta_j, get_as<std::vector<double>>(value, key)};
        require(!spec.values.empty(), "betaJ list must not be empty");
        cfg.beta_j = spec.values.front();
        cfg.sweep = std::move(spec);
      } else {
        cfg.beta_j = get_as<double>(value, key);
      }
    } else if (key == "betaPrime") {
      cfg.beta_prime = get_as<double>(value, key);
    } else if (key == "realizations") {
      cfg.realizations = get_as<int>(value, key);
    } else if (key == "t_end") {
      cfg.t_end = get_as<double>(value, key);
    } else if (key == "grid_points") {
      cfg.grid_points = get_as<int>(value, key);
    } else if (key == "steady_state") {
      require(value.is_object(), "steady_state must be an object");
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "T") {
          cfg.steady_window = get_as<double>(sv, "steady_state.T");
        } else if (sk == "tol") {
          cfg.steady_tol = get_as<double>(sv, "steady_state.tol");
        } else {
          throw ParameterError("unknown key 'steady_state." + sk + "'");
        }
      }
    } else if (key == "master_seed") {
      cfg.master_seed = get_as<std::uint64_t>(value, key);
    } else if (key == "landscape_policy") {
      cfg.landscape_policy = parse_landscape_policy(get_as<std::string>(value, key));
    } else if (key == "output_dir") {
      cfg.output_dir = get_as<std::string>(value, key);
    } else if (key == "network") {
      if (value.is_string()) {
        require(value.get<std::string>() == "complete", "network must be 'complete' or layers");
        cfg.layers.clear();
      } else {
        require(value.is_object() && value.contains("layers"), "network needs 'layers'");
        cfg.layers.clear();
        for (const auto& layer : value.at("layers")) {
          EdgeList edges;
          for (const auto& e : layer) {
            const auto pair = get_as<std::vector<int>>(e, "network.layers");
            require(pair.size() == 2, "an edge is a pair of member indices");
            edges.emplace_back(pair[0], pair[1]);
          }
          cfg.layers.push_back(std::move(edges));
        }
      }
    } else if (key == "sweep") {
      require(value.is_object() && value.contains("axis") && value.contains("values"),
              "sweep needs 'axis' and 'values'");
      cfg.sweep = SweepSpec{parse_sweep_axis(get_as<std::string>(value.at("axis"), "sweep.axis")),
                            get_as<std::vector<double>>(value.at("values"), "sweep.values")};
    } else {
      throw ParameterError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Multiplex build_network(const ExperimentConfig& cfg) {
  if (cfg.layers.empty()) return build_complete_multiplex(cfg.members, cfg.decisions);
  return Multiplex(cfg.members, cfg.layers);
}

RealizationSeeds realization_seeds(std::uint64_t master_seed, int realization,
                                   LandscapePolicy policy) {
  const std::uint64_t base =
      derive_seed(derive_seed(master_seed, stream::realization), static_cast<std::uint64_t>(realization));
  RealizationSeeds seeds;
  seeds.landscape = policy == LandscapePolicy::shared
                        ? derive_seed(master_seed, stream::landscape)
                        : derive_seed(base, stream::landscape);
  seeds.competence = derive_seed(base, stream::competence);
  seeds.trajectory = derive_seed(base, stream::trajectory);
  return seeds;
}

int worker_count() {
  if (const char* env = std::getenv("NKGROUP_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

template <typename Task>
void parallel_for(int count, int workers, Task task) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SteadyEstimate estimate(const ObservableCurve& curve, const std::vector<std::vector<double>>& rows,
                        double window, double tol) {
  const SteadyState steady = steady_state_value(curve, window, tol);
  SteadyEstimate out;
  out.value = steady.value;
  out.converged = steady.converged;
  out.t_reached = steady.t_reached;
  const auto count = static_cast<double>(rows.size());
  if (rows.size() > 1) {
    std::vector<double> averages;
    averages.reserve(rows.size());
    double sum = 0.0;
    for (const auto& row : rows) {
      averages.push_back(
          window_average(curve.grid, row, steady.window_begin, steady.window_end));
      sum += averages.back();
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (double a : averages) ss += (a - mean) * (a - mean);
    out.std_error = std::sqrt(ss / (count - 1.0) / count);
  }
  return out;
}

}  // namespace

EnsembleResult run_ensemble(const ExperimentConfig& cfg, const RunOptions& options) {
  validate_config(cfg);
  const auto grid = make_grid(cfg.t_end, cfg.grid_points);
  const Multiplex network = build_network(cfg);
  const Coupling coupling{cfg.beta_j, cfg.beta_prime};

  std::optional<Landscape> shared;
  double shared_vmax = 0.0;
  if (cfg.landscape_policy == LandscapePolicy::shared) {
    shared = generate_landscape(cfg.decisions, cfg.k,
                                realization_seeds(cfg.master_seed, 0, cfg.landscape_policy).landscape);
    shared_vmax = global_max(*shared).value;
  }

  std::vector<TrajectoryRecord> records(cfg.realizations);
  parallel_for(cfg.realizations, options.workers > 0 ? options.workers : worker_count(),
               [&](int r) {
                 const auto seeds = realization_seeds(cfg.master_seed, r, cfg.landscape_policy);
                 std::optional<Landscape> own;
                 double v_max = shared_vmax;
                 if (!shared) {
                   own = generate_landscape(cfg.decisions, cfg.k, seeds.landscape);
                   v_max = global_max(*own).value;
                 }
                 const Landscape& landscape = shared ? *shared : *own;
                 const auto competence =
                     generate_competence(cfg.members, cfg.decisions, cfg.p, seeds.competence);
                 records[r] = simulate_trajectory(landscape, competence, network, coupling,
                                                  cfg.t_end, grid, seeds.trajectory);
                 records[r].v_max = v_max;
               });

  EnsembleResult result;
  result.curves = ensemble_average(records);

  std::vector<std::vector<double>> fitness_rows;
  std::vector<std::vector<double>> consensus_rows;
  fitness_rows.reserve(records.size());
  consensus_rows.reserve(records.size());
  for (const auto& r : records) {
    std::vector<double> normalized(r.fitness.size());
    for (std::size_t i = 0; i < normalized.size(); ++i) normalized[i] = r.fitness[i] / r.v_max;
    fitness_rows.push_back(std::move(normalized));
    consensus_rows.push_back(r.consensus);
  }

  SweepRow& row = result.row;
  row.axis_value = cfg.beta_j;
  row.m_beta_j = cfg.members * cfg.beta_j;
  row.fitness = estimate(result.curves.fitness, fitness_rows, cfg.steady_window, cfg.steady_tol);
  row.consensus =
      estimate(result.curves.consensus, consensus_rows, cfg.steady_window, cfg.steady_tol);
  row.realizations = cfg.realizations;

  if (options.records) *options.records = std::move(records);
  return result;
}

ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig out = cfg;
  auto as_int = [&](const char* name) {
    require(std::isfinite(value) && value == std::round(value),
            std::string(name) + " sweep values must be integers");
    return static_cast<int>(value);
  };
  switch (axis) {
    case SweepAxis::beta_j:
      out.beta_j = value;
      break;
    case SweepAxis::p:
      out.p = value;
      break;
    case SweepAxis::k:
      out.k = as_int("K");
      break;
    case SweepAxis::m:
      require(cfg.layers.empty(), "an M sweep needs the complete network");
      out.members = as_int("M");
      break;
  }
  return out;
}

SweepResult sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                  const RunOptions& options) {
  require(!values.empty(), "sweep needs at least one value");
  SweepResult result;
  result.axis = axis;
  for (double v : values) {
    ExperimentConfig point = with_axis_value(cfg, axis, v);
    point.sweep.reset();
    EnsembleResult ens = run_ensemble(point, {options.workers, nullptr});
    ens.row.axis_value = v;
    result.rows.push_back(ens.row);
    result.curves.push_back(std::move(ens.curves));
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "axis,value,m_beta_j,fitness_norm,stderr_fitness,fitness_converged,consensus,"
         "stderr_consensus,consensus_converged,t_reached_fitness,t_reached_consensus,"
         "n_realizations\n";
  for (const auto& row : result.rows) {
    out << to_string(result.axis) << ',' << format_real(row.axis_value) << ','
        << format_real(row.m_beta_j) << ',' << format_real(row.fitness.value) << ','
        << format_real(row.fitness.std_error) << ',' << (row.fitness.converged ? 1 : 0) << ','
        << format_real(row.consensus.value) << ',' << format_real(row.consensus.std_error)
        << ',' << (row.consensus.converged ? 1 : 0) << ',' << format_real(row.fitness.t_reached)
        << ',' << format_real(row.consensus.t_reached) << ',' << row.realizations << '\n';
  }
}

bool ValidationReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

ValidationReport validate(const ExperimentConfig& cfg, const ValidationOptions& options) {
  validate_config(cfg);
  require(cfg.members * cfg.decisions <= kMaxExactOpinions,
          "validation needs M*N <= " + std::to_string(kMaxExactOpinions));

  const auto seeds = realization_seeds(cfg.master_seed, 0, cfg.landscape_policy);
  const Landscape landscape = generate_landscape(cfg.decisions, cfg.k, seeds.landscape);
  const CompetenceMatrix competence =
      generate_competence(cfg.members, cfg.decisions, cfg.p, seeds.competence);
  const Multiplex network = build_network(cfg);
  const Coupling coupling{cfg.beta_j, cfg.beta_prime};

  ExactModel model = build_generator(landscape, competence, network, coupling);
  if (options.rate_perturbation != 0.0) {
    model.set_flip_rate(0, 0, model.flip_rate(0, 0) * (1.0 + options.rate_perturbation));
  }

  ValidationReport report;
  report.stationary = stationary_distribution(model);
  const auto& pi = report.stationary;
  auto add = [&](std::string name, double value, double threshold) {
    report.checks.push_back({std::move(name), value, threshold, value < threshold});
  };

  add("stationary_residual", stationary_residual(model, pi), 1e-10);
  add("detailed_balance_residual", check_detailed_balance(model, pi), 1e-10);
  const auto analytic = analytic_stationary(landscape, competence, network, coupling);
  add("stationary_vs_analytic_tv", total_variation(pi, analytic), 1e-8);
  if (cfg.beta_prime == 0.0) {
    add("ising_reduction_tv",
        total_variation(analytic, boltzmann_distribution(network, cfg.decisions, cfg.beta_j)),
        1e-12);
  }

  Rng rng = make_rng(derive_seed(seeds.trajectory, stream::oracle));
  Simulator sim(landscape, competence, network, coupling,
                GroupState::random(cfg.members, cfg.decisions, rng));
  std::vector<double> occupancy(model.states(), 0.0);
  std::uint64_t code = sim.state().encode();
  while (sim.events() < options.min_events) {
    const Step step = sim.draw(rng);
    occupancy[code] += step.dt;
    sim.apply(step);
    code ^= std::uint64_t{1} << step.index;
  }
  double total_time = 0.0;
  for (double t : occupancy) total_time += t;
  for (double& t : occupancy) t /= total_time;
  report.events = sim.events();
  add("simulation_occupancy_tv", total_variation(occupancy, pi), 0.02);
  return report;
}

void write_validation_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_real(c.value)
        << " threshold=" << format_real(c.threshold) << '\n';
  }
  out << "events=" << report.events << '\n';
  out << (report.passed() ? "validation passed" : "validation FAILED") << '\n';
}

}  // namespace nkgroup
