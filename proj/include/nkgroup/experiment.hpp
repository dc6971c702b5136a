#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nkgroup/dynamics.hpp"
#include "nkgroup/metrics.hpp"
#include "nkgroup/multiplex.hpp"

namespace nkgroup {

enum class LandscapePolicy { per_realization, shared };
enum class SweepAxis { beta_j, p, k, m };

const char* to_string(LandscapePolicy policy);
const char* to_string(SweepAxis axis);
LandscapePolicy parse_landscape_policy(const std::string& text);
SweepAxis parse_sweep_axis(const std::string& text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::beta_j;
  std::vector<double> values;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  int members = 6;
  int decisions = 12;
  int k = 5;
  double p = 0.5;
  double beta_j = 0.5;
  double beta_prime = 10.0;
  int realizations = 100;
  double t_end = 200.0;
  int grid_points = 400;
  double steady_window = 10.0;
  double steady_tol = 0.005;
  std::uint64_t master_seed = 1;
  LandscapePolicy landscape_policy = LandscapePolicy::per_realization;
  // Per-layer edge lists; empty means every layer is complete.
  std::vector<EdgeList> layers;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ParameterError naming the first invalid field.
void validate_config(const ExperimentConfig& cfg);

/// JSON keys: M, N, K, p, betaJ, betaPrime, realizations, t_end, grid_points,
/// steady_state {T, tol}, master_seed, landscape_policy, network
/// ("complete" or {"layers": [[[a, b], ...], ...]}), sweep {axis, values},
/// output_dir. Missing keys keep their defaults; unknown keys are rejected.
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

Multiplex build_network(const ExperimentConfig& cfg);

struct RealizationSeeds {
  std::uint64_t landscape;
  std::uint64_t competence;
  std::uint64_t trajectory;
};

/// Seeds for realization r, a pure function of (master_seed, r, policy).
RealizationSeeds realization_seeds(std::uint64_t master_seed, int realization,
                                   LandscapePolicy policy);

/// Worker threads for ensembles: NKGROUP_WORKERS when set, else the
/// hardware concurrency.
int worker_count();

struct SteadyEstimate {
  double value = 0.0;
  double std_error = 0.0;  // across realizations of their window averages
  bool converged = false;
  double t_reached = 0.0;
};

struct SweepRow {
  double axis_value = 0.0;
  double m_beta_j = 0.0;
  SteadyEstimate fitness;    // normalized by V_max
  SteadyEstimate consensus;
  int realizations = 0;
};

struct EnsembleResult {
  EnsembleCurves curves;
  SweepRow row;
};

struct RunOptions {
  int workers = 0;  // 0: worker_count()
  std::vector<TrajectoryRecord>* records = nullptr;  // receives every record when set
};

/// Runs cfg.realizations independent trajectories and aggregates them. The
/// result does not depend on the number of workers.
EnsembleResult run_ensemble(const ExperimentConfig& cfg, const RunOptions& options = {});

struct SweepResult {
  SweepAxis axis = SweepAxis::beta_j;
  std::vector<SweepRow> rows;
  std::vector<EnsembleCurves> curves;
};

/// cfg with one parameter replaced.
ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value);

/// One ensemble per value; every point reuses cfg.master_seed.
SweepResult sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                  const RunOptions& options = {});

/// Header: axis,value,m_beta_j,fitness_norm,stderr_fitness,fitness_converged,
/// consensus,stderr_consensus,consensus_converged,t_reached_fitness,
/// t_reached_consensus,n_realizations
void write_sweep_csv(std::ostream& out, const SweepResult& result);

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<double> stationary;  // solved from the generator
  std::uint64_t events = 0;
  bool passed() const;
};

struct ValidationOptions {
  std::uint64_t min_events = 1'000'000;
  // Test hook: scales one generator entry by (1 + rate_perturbation).
  double rate_perturbation = 0.0;
};

/// Exact cross-checks on a tiny instance (M*N <= 16): detailed balance,
/// solved vs closed-form stationary law, simulated occupancy vs exact law,
/// and the Ising reduction when betaPrime == 0.
ValidationReport validate(const ExperimentConfig& cfg, const ValidationOptions& options = {});

void write_validation_report(std::ostream& out, const ValidationReport& report);

}  // namespace nkgroup
