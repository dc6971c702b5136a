// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nkgroup/dynamics.hpp"
#include "nkgroup/exact_oracle.hpp"
#include "nkgroup/experiment.hpp"
#include "nkgroup/meanfield.hpp"
#include "nkgroup/metrics.hpp"
#include "stats.hpp"

using namespace nkgroup;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string series(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + fmt("%.4f", x);
  return out;
}

ExperimentConfig reference_config() {
  ExperimentConfig cfg;  // M=6, N=12, K=5, p=0.5, betaPrime=10, 100 realizations
  cfg.master_seed = 1;
  return cfg;
}

std::vector<double> fitness_of(const SweepResult& s) {
  std::vector<double> v;
  for (const auto& r : s.rows) v.push_back(r.fitness.value);
  return v;
}

std::vector<double> consensus_of(const SweepResult& s) {
  std::vector<double> v;
  for (const auto& r : s.rows) v.push_back(r.consensus.value);
  return v;
}

int unconverged(const SweepResult& s) {
  int n = 0;
  for (const auto& r : s.rows) n += !r.fitness.converged + !r.consensus.converged;
  return n;
}

Outcome exact_stationary_law() {
  double worst_tv = 0.0, worst_db = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto L = generate_landscape(2, 1, derive_seed(seed, stream::landscape));
    const auto C = generate_competence(2, 2, 0.5, derive_seed(seed, stream::competence));
    const auto net = build_complete_multiplex(2, 2);
    const Coupling c{0.5, 10.0};
    const auto model = build_generator(L, C, net, c);
    const auto pi = stationary_distribution(model);
    worst_tv = std::max(worst_tv, total_variation(pi, analytic_stationary(L, C, net, c)));
    worst_db = std::max(worst_db, check_detailed_balance(model, pi));
  }
  return {worst_tv < 1e-8 && worst_db < 1e-10,
          "20 instances, max TV " + fmt("%.3g", worst_tv) + " (< 1e-8), max balance residual " +
              fmt("%.3g", worst_db) + " (< 1e-10)"};
}

Outcome simulation_vs_oracle() {
  ExperimentConfig cfg;
  cfg.members = 2;
  cfg.decisions = 2;
  cfg.k = 1;
  const auto report = validate(cfg);
  double tv = 1.0;
  for (const auto& c : report.checks) {
    if (c.name == "simulation_occupancy_tv") tv = c.value;
  }
  return {report.events >= 1'000'000 && tv < 0.02,
          std::to_string(report.events) + " events, occupancy TV " + fmt("%.4f", tv) +
              " (< 0.02)"};
}

Outcome consensus_baseline() {
  auto cfg = reference_config();
  cfg.beta_j = 0.0;
  cfg.beta_prime = 0.0;
  const auto r = run_ensemble(cfg);
  const double c = r.row.consensus.value;
  return {std::abs(c - 1.0 / 6.0) <= 0.02,
          "<C_inf> = " + fmt("%.4f", c) + " +- " + fmt("%.4f", r.row.consensus.std_error) +
              (r.row.consensus.converged ? "" : " (not converged)") + ", target 1/6 +- 0.02"};
}

Outcome social_benefit() {
  const auto s = sweep(reference_config(), SweepAxis::beta_j, {0.0, 0.5});
  const auto& a = s.rows[0].fitness;
  const auto& b = s.rows[1].fitness;
  const double se = std::hypot(a.std_error, b.std_error);
  const double z = (b.value - a.value) / se;
  return {z >= 5.0, "V(0.5) - V(0) = " + fmt("%.4f", b.value - a.value) + " = " +
                        fmt("%.1f", z) + " standard errors (>= 5)"};
}

bool monotone_within_errors(const SweepResult& s) {
  for (std::size_t i = 0; i + 1 < s.rows.size(); ++i) {
    const auto& a = s.rows[i].consensus;
    const auto& b = s.rows[i + 1].consensus;
    if (b.value - a.value < -(a.std_error + b.std_error)) return false;
  }
  return true;
}

Outcome interior_optimum() {
  const auto s = sweep(reference_config(), SweepAxis::beta_j, {0.0, 0.1, 0.2, 0.3, 0.5, 1.0, 1.5});
  const auto v = fitness_of(s);
  const auto best = std::max_element(v.begin(), v.end()) - v.begin();
  const bool interior = best > 0 && best + 1 < static_cast<long>(v.size());
  const bool monotone = monotone_within_errors(s);
  return {interior && monotone,
          "V: " + series(v) + "; argmax betaJ = " + fmt("%g", s.rows[best].axis_value) +
              "; C: " + series(consensus_of(s)) +
              (monotone ? " monotone" : " NOT monotone") + " within errors" +
              (unconverged(s) ? "; unconverged observables: " + std::to_string(unconverged(s))
                              : "")};
}

Outcome criticality() {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0};
  bool ok = true;
  double previous_slope = 0.0;
  std::string detail;
  for (int m : {6, 12, 24}) {
    auto cfg = reference_config();
    cfg.members = m;
    std::vector<double> beta;
    for (double x : grid) beta.push_back(x / m);
    const auto s = sweep(cfg, SweepAxis::beta_j, beta);
    const auto fit = fit_transition(grid, consensus_of(s));
    const bool located = fit.center >= 0.7 && fit.center <= 1.5;
    const bool sharper = fit.max_slope > previous_slope;
    ok = ok && located && sharper;
    previous_slope = fit.max_slope;
    detail += "M=" + std::to_string(m) + ": center " + fmt("%.3f", fit.center) + ", slope " +
              fmt("%.3f", fit.max_slope) + ", raw steepest " +
              fmt("%.3f", steepest_segment(grid, consensus_of(s))) + "; ";
  }
  return {ok, detail + "need center in [0.7, 1.5] and slope increasing in M"};
}

Outcome mean_field() {
  bool ok = critical_coupling(6) == 1.0 / 6.0 && critical_coupling(12) == 1.0 / 12.0 &&
            critical_coupling(24) == 1.0 / 24.0;
  const auto sol = magnetization_fixed_points(2.0);
  ok = ok && sol.fixed_points.size() == 3 &&
       std::abs(sol.fixed_points[0].magnetization + 0.9575) < 1e-4 &&
       sol.fixed_points[1].magnetization == 0.0 &&
       std::abs(sol.fixed_points[2].magnetization - 0.9575) < 1e-4;
  for (double x : {0.0, 0.3, 0.7, 1.0}) {
    const auto below = magnetization_fixed_points(x);
    ok = ok && below.fixed_points.size() == 1 && below.fixed_points[0].magnetization == 0.0;
  }
  return {ok, "m*(2) = " + fmt("%.10f", spontaneous_magnetization(2.0)) +
                  ", critical couplings 1/M, trivial root only for x <= 1"};
}

Outcome knowledge_saturation() {
  auto cfg = reference_config();
  const auto s = sweep(cfg, SweepAxis::p, {0.05, 0.1, 0.2, 0.6, 1.0});
  const auto v = fitness_of(s);
  const auto c = consensus_of(s);
  bool increasing = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) increasing = increasing && v[i + 1] > v[i];
  const bool saturates = (v[4] - v[3]) < (v[2] - v[0]);
  const auto low = std::min_element(c.begin(), c.end()) - c.begin();
  bool dip = low > 0 && low + 1 < static_cast<long>(c.size());
  if (dip) {
    const auto& m = s.rows[low].consensus;
    for (long end : {0L, static_cast<long>(c.size()) - 1}) {
      const auto& e = s.rows[end].consensus;
      dip = dip && e.value - m.value > e.std_error + m.std_error;
    }
  }
  return {increasing && saturates && dip,
          "V: " + series(v) + (increasing ? " increasing" : " NOT increasing") +
              "; gain 0.6->1 " + fmt("%.4f", v[4] - v[3]) + " vs 0.05->0.2 " +
              fmt("%.4f", v[2] - v[0]) + "; C: " + series(c) +
              (dip ? " interior minimum" : " no resolved interior minimum")};
}

Outcome statistical_units() {
  const auto L = generate_landscape(12, 5, 11);
  const auto C = generate_competence(6, 12, 0.5, 12);
  const auto net = build_complete_multiplex(6, 12);
  Rng rng(13);
  const auto s = GroupState::random(6, 12, rng);
  const Coupling mild{0.2, 1.0};
  const auto rv = compute_rates(s, mild, net, L, C);
  const int draws = 100000;
  std::vector<double> dts(draws);
  std::vector<long> counts(rv.rates.size(), 0);
  for (int i = 0; i < draws; ++i) {
    const Step step = gillespie_step(rv.rates, rv.total, rng);
    dts[i] = step.dt;
    ++counts[step.index];
  }
  std::vector<double> nu(rv.rates.size());
  for (std::size_t l = 0; l < nu.size(); ++l) nu[l] = rv.rates[l] / rv.total;
  const double ks = stats::ks_exponential(dts, rv.total);
  const double x2 = stats::chi_square(counts, nu);

  const Coupling paper{0.5, 10.0};
  Simulator sim(L, C, net, paper, s);
  for (int e = 0; e < 1000; ++e) sim.advance(rng);
  const auto full = compute_rates(sim.state(), paper, net, L, C);
  double gap = 0.0;
  for (std::size_t l = 0; l < full.rates.size(); ++l) {
    gap = std::max(gap, std::abs(sim.rates()[l] - full.rates[l]) / full.rates[l]);
  }
  return {ks < stats::kKolmogorov99 && x2 < stats::kChiSquare99Df71 && gap < 1e-12,
          "KS sqrt(n)D = " + fmt("%.3f", ks) + " (< 1.628), chi2 = " + fmt("%.1f", x2) +
              " (< 101.6, df 71), incremental gap " + fmt("%.2g", gap) + " (< 1e-12)"};
}

Outcome nk_sanity() {
  int hits = 0;
  for (int t = 0; t < 100; ++t) {
    const auto L = generate_landscape(12, 0, derive_seed(2024, t));
    DecisionVector greedy(12);
    for (int j = 0; j < 12; ++j) greedy[j] = L.table(j)[1] >= L.table(j)[0] ? 1 : -1;
    hits += fitness(L, greedy) == global_max(L).value;
  }
  return {hits == 100, std::to_string(hits) + "/100 landscapes solved exactly by greedy"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact stationary law", 1.0, exact_stationary_law},
      {2, "simulation vs exact occupancy", 30.0, simulation_vs_oracle},
      {3, "consensus baseline", 60.0, consensus_baseline},
      {4, "social-interaction benefit", 600.0, social_benefit},
      {5, "interior optimum in betaJ", 0.0, interior_optimum},
      {6, "criticality collapse", 3600.0, criticality},
      {7, "mean-field fixed points", 1.0, mean_field},
      {8, "knowledge saturation", 0.0, knowledge_saturation},
      {9, "statistical unit tests", 0.0, statistical_units},
      {10, "NK sanity", 0.0, nk_sanity},
  };
  std::printf("acceptance suite, %d worker(s)\n", worker_count());
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      out.passed = false;
      out.detail += "; over the " + fmt("%g", c.budget_s) + " s budget";
    }
    failures += !out.passed;
    std::printf("%s %2d %s [%.2f s]: %s\n", out.passed ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
