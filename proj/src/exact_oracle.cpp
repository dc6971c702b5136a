#include "nkgroup/exact_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "nkgroup/dynamics.hpp"
#include "nkgroup/error.hpp"

namespace nkgroup {

namespace {

constexpr std::size_t kDirectSolveStates = std::size_t{1} << 10;
constexpr double kResidualTarget = 1e-12;

void check_size(int members, int decisions) {
  require(members >= 1 && decisions >= 1, "M and N must be positive");
  require(members * decisions <= kMaxExactOpinions,
          "exact enumeration needs M*N <= " + std::to_string(kMaxExactOpinions) + ", got " +
              std::to_string(members * decisions));
}

std::vector<double> normalize_log_weights(std::vector<double> log_w) {
  const double peak = *std::max_element(log_w.begin(), log_w.end());
  double z = 0.0;
  for (double& x : log_w) {
    x = std::exp(x - peak);
    z += x;
  }
  for (double& x : log_w) x /= z;
  return log_w;
}

std::vector<double> solve_gth(const ExactModel& model) {
  const std::size_t size = model.states();
  std::vector<double> p(size * size, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return p[i * size + j]; };
  for (std::size_t s = 0; s < size; ++s) {
    for (int l = 0; l < model.opinions(); ++l) at(s, s ^ (std::size_t{1} << l)) = model.flip_rate(s, l);
  }

  for (std::size_t k = size - 1; k >= 1; --k) {
    double out = 0.0;
    for (std::size_t j = 0; j < k; ++j) out += at(k, j);
    if (!(out > 0.0)) throw NumericalError("chain is reducible; state elimination failed");
    for (std::size_t i = 0; i < k; ++i) at(i, k) /= out;
    for (std::size_t i = 0; i < k; ++i) {
      const double factor = at(i, k);
      if (factor == 0.0) continue;
      double* row_i = &p[i * size];
      const double* row_k = &p[k * size];
      for (std::size_t j = 0; j < k; ++j) row_i[j] += factor * row_k[j];
    }
  }

  std::vector<double> pi(size, 0.0);
  pi[0] = 1.0;
  for (std::size_t j = 1; j < size; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < j; ++i) sum += pi[i] * at(i, j);
    pi[j] = sum;
  }
  double z = 0.0;
  for (double x : pi) z += x;
  for (double& x : pi) x /= z;
  return pi;
}

std::vector<double> solve_gauss_seidel(const ExactModel& model, double target) {
  const std::size_t size = model.states();
  const int n = model.opinions();
  std::vector<double> pi(size, 1.0 / static_cast<double>(size));
  for (int sweep = 0; sweep < 200000; ++sweep) {
    for (std::size_t s = 0; s < size; ++s) {
      double inflow = 0.0;
      for (int l = 0; l < n; ++l) {
        const std::size_t from = s ^ (std::size_t{1} << l);
        inflow += pi[from] * model.flip_rate(from, l);
      }
      pi[s] = inflow / model.exit_rate(s);
    }
    double z = 0.0;
    for (double x : pi) z += x;
    for (double& x : pi) x /= z;
    if (sweep % 16 == 15 && stationary_residual(model, pi) < target) return pi;
  }
  const double residual = stationary_residual(model, pi);
  if (residual < target) return pi;
  throw NumericalError("Gauss-Seidel did not converge; residual " + std::to_string(residual));
}

}  // namespace

ExactModel::ExactModel(int members, int decisions, std::vector<double> flip_rates)
    : m_(members), n_(decisions), rates_(std::move(flip_rates)) {
  check_size(members, decisions);
  require(rates_.size() == states() * static_cast<std::size_t>(opinions()),
          "need one flip rate per (state, opinion)");
  for (double w : rates_) require(w >= 0.0 && std::isfinite(w), "flip rates must be >= 0");
}

void ExactModel::set_flip_rate(std::uint64_t state, int index, double rate) {
  require(rate >= 0.0 && std::isfinite(rate), "flip rates must be >= 0");
  rates_[state * opinions() + index] = rate;
}

double ExactModel::generator(std::uint64_t from, std::uint64_t to) const {
  if (from == to) return -exit_rate(from);
  const std::uint64_t diff = from ^ to;
  if ((diff & (diff - 1)) != 0) return 0.0;
  return flip_rate(from, std::countr_zero(diff));
}

double ExactModel::exit_rate(std::uint64_t state) const {
  double out = 0.0;
  for (int l = 0; l < opinions(); ++l) out += flip_rate(state, l);
  return out;
}

ExactModel build_generator(const Landscape& landscape, const CompetenceMatrix& competence,
                           const Multiplex& network, const Coupling& coupling) {
  const int m = network.members();
  const int n = landscape.n();
  check_size(m, n);
  const std::size_t size = std::size_t{1} << (m * n);
  std::vector<double> rates(size * m * n);
  for (std::size_t code = 0; code < size; ++code) {
    const GroupState state = GroupState::decode(code, m, n);
    const RateVector w = compute_rates(state, coupling, network, landscape, competence);
    std::copy(w.rates.begin(), w.rates.end(), rates.begin() + code * m * n);
  }
  return ExactModel(m, n, std::move(rates));
}

double stationary_residual(const ExactModel& model, std::span<const double> pi) {
  const std::size_t size = model.states();
  const int n = model.opinions();
  double worst = 0.0;
  for (std::size_t s = 0; s < size; ++s) {
    double flow = -pi[s] * model.exit_rate(s);
    for (int l = 0; l < n; ++l) {
      const std::size_t from = s ^ (std::size_t{1} << l);
      flow += pi[from] * model.flip_rate(from, l);
    }
    worst = std::max(worst, std::abs(flow));
  }
  return worst;
}

std::vector<double> stationary_distribution(const ExactModel& model) {
  double max_exit = 0.0;
  for (std::size_t s = 0; s < model.states(); ++s) max_exit = std::max(max_exit, model.exit_rate(s));
  const double target = kResidualTarget * std::max(max_exit, 1.0);

  std::vector<double> pi = model.states() <= kDirectSolveStates ? solve_gth(model)
                                                                : solve_gauss_seidel(model, target);
  const double residual = stationary_residual(model, pi);
  if (!(residual < target)) {
    throw NumericalError("stationary solve residual " + std::to_string(residual) +
                         " exceeds " + std::to_string(target));
  }
  return pi;
}

std::vector<double> analytic_stationary(const Landscape& landscape,
                                        const CompetenceMatrix& competence,
                                        const Multiplex& network, const Coupling& coupling) {
  const int m = network.members();
  const int n = landscape.n();
  check_size(m, n);
  const std::size_t size = std::size_t{1} << (m * n);
  std::vector<double> log_w(size);
  for (std::size_t code = 0; code < size; ++code) {
    const GroupState state = GroupState::decode(code, m, n);
    // -beta E(s) = (betaJ / 2) sum_l s_l h_l
    double exponent = -total_conflict(network, state, coupling.beta_j);
    double payoff = 0.0;
    for (int k = 0; k < m; ++k) {
      payoff += perceived_fitness(landscape, competence, k, state.member(k));
    }
    exponent += 2.0 * coupling.beta_prime * payoff;
    log_w[code] = exponent;
  }
  return normalize_log_weights(std::move(log_w));
}

std::vector<double> boltzmann_distribution(const Multiplex& network, int decisions,
                                           double beta_j) {
  const int m = network.members();
  check_size(m, decisions);
  const std::size_t size = std::size_t{1} << (m * decisions);
  std::vector<double> log_w(size);
  for (std::size_t code = 0; code < size; ++code) {
    log_w[code] = -total_conflict(network, GroupState::decode(code, m, decisions), beta_j);
  }
  return normalize_log_weights(std::move(log_w));
}

double check_detailed_balance(const ExactModel& model, std::span<const double> pi) {
  require(pi.size() == model.states(), "distribution size does not match the model");
  constexpr double tiny = 1e-300;
  double worst = 0.0;
  for (std::size_t s = 0; s < model.states(); ++s) {
    for (int l = 0; l < model.opinions(); ++l) {
      const std::size_t t = s ^ (std::size_t{1} << l);
      if (t < s) continue;
      const double forward = model.flip_rate(s, l) * pi[s];
      const double backward = model.flip_rate(t, l) * pi[t];
      const double scale = std::max(forward, tiny);
      worst = std::max(worst, std::abs(forward - backward) / scale);
    }
  }
  return worst;
}

double check_detailed_balance(const ExactModel& model) {
  return check_detailed_balance(model, stationary_distribution(model));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "distributions differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace nkgroup
