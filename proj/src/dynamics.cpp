#include "nkgroup/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nkgroup/error.hpp"
#include "nkgroup/metrics.hpp"

namespace nkgroup {

namespace {

void check_coupling(const Coupling& c) {
  require(std::isfinite(c.beta_j) && c.beta_j >= 0.0, "betaJ must be finite and >= 0");
  require(std::isfinite(c.beta_prime) && c.beta_prime >= 0.0 && c.beta_prime <= kMaxBetaPrime,
          "betaPrime must lie in [0, 100]");
}

void check_instance(const GroupState& state, const Multiplex& network,
                    const Landscape& landscape, const CompetenceMatrix& competence) {
  require(network.members() == state.members() && network.layers() == state.decisions(),
          "network and state shapes differ");
  require(landscape.n() == state.decisions(), "landscape and state disagree on N");
  require(competence.m() == state.members() && competence.n() == state.decisions(),
          "competence matrix and state shapes differ");
}

}  // namespace

double glauber_factor(const GroupState& state, int index, double beta_j,
                      const Multiplex& network) {
  const double field = local_field(network, state, index);
  return 0.5 * (1.0 - state[index] * std::tanh(beta_j * field));
}

double payoff_delta(const GroupState& state, int index, const Landscape& landscape,
                    const CompetenceMatrix& competence) {
  const int n = state.decisions();
  const int member = index / n;
  const int decision = index % n;
  const int known = competence.known_count(member);
  if (known == 0) return 0.0;

  const auto sigma = state.member(member);
  const auto& dependents = landscape.dependents(decision);
  const auto& masks = landscape.dependent_masks(decision);
  double delta = 0.0;
  for (std::size_t i = 0; i < dependents.size(); ++i) {
    const int m = dependents[i];
    if (!competence.knows(member, m)) continue;
    const auto table = landscape.table(m);
    const std::uint32_t idx = landscape.table_index(m, sigma);
    delta += table[idx ^ masks[i]] - table[idx];
  }
  return delta / known;
}

double transition_rate(const GroupState& state, int index, const Coupling& coupling,
                       const Multiplex& network, const Landscape& landscape,
                       const CompetenceMatrix& competence) {
  return glauber_factor(state, index, coupling.beta_j, network) *
         std::exp(coupling.beta_prime * payoff_delta(state, index, landscape, competence));
}

RateVector compute_rates(const GroupState& state, const Coupling& coupling,
                         const Multiplex& network, const Landscape& landscape,
                         const CompetenceMatrix& competence) {
  check_coupling(coupling);
  check_instance(state, network, landscape, competence);
  RateVector out;
  out.rates.resize(state.size());
  for (int l = 0; l < state.size(); ++l) {
    out.rates[l] = transition_rate(state, l, coupling, network, landscape, competence);
    out.total += out.rates[l];
  }
  return out;
}

Step gillespie_step(std::span<const double> rates, double total, Rng& rng) {
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("total rate must be positive and finite, got " +
                         std::to_string(total));
  }
  const double dt = -std::log(uniform_open_closed(rng)) / total;
  const double target = uniform01(rng) * total;
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t l = 0; l < rates.size(); ++l) {
    if (rates[l] <= 0.0) continue;
    cumulative += rates[l];
    last_positive = static_cast<int>(l);
    if (target < cumulative) return {static_cast<int>(l), dt};
  }
  // Rounding can leave target just above the final partial sum.
  return {last_positive, dt};
}

Simulator::Simulator(const Landscape& landscape, const CompetenceMatrix& competence,
                     const Multiplex& network, const Coupling& coupling, GroupState initial)
    : landscape_(&landscape),
      competence_(&competence),
      network_(&network),
      coupling_(coupling),
      state_(std::move(initial)) {
  check_coupling(coupling_);
  check_instance(state_, network, landscape, competence);
  const int size = state_.size();
  glauber_.resize(size);
  payoff_.resize(size);
  rates_.resize(size);
  for (int l = 0; l < size; ++l) {
    glauber_[l] = glauber_factor(state_, l, coupling_.beta_j, *network_);
    payoff_[l] = std::exp(coupling_.beta_prime *
                          payoff_delta(state_, l, *landscape_, *competence_));
    rates_[l] = glauber_[l] * payoff_[l];
  }
}

double Simulator::total_rate() const {
  double total = 0.0;
  for (double w : rates_) total += w;
  return total;
}

void Simulator::apply(const Step& step) {
  time_ += step.dt;
  flip(step.index);
}

void Simulator::refresh_glauber(int index) {
  glauber_[index] = glauber_factor(state_, index, coupling_.beta_j, *network_);
  rates_[index] = glauber_[index] * payoff_[index];
}

void Simulator::refresh_payoff(int index) {
  payoff_[index] =
      std::exp(coupling_.beta_prime * payoff_delta(state_, index, *landscape_, *competence_));
  rates_[index] = glauber_[index] * payoff_[index];
}

void Simulator::flip(int index) {
  const int n = state_.decisions();
  const int member = index / n;
  const int decision = index % n;
  state_.flip(index);
  ++events_;

  refresh_glauber(index);
  for (int h : network_->neighbors(decision, member)) refresh_glauber(h * n + decision);
  for (int m : landscape_->coupled(decision)) refresh_payoff(member * n + m);
}

std::vector<double> make_grid(double t_end, int points) {
  require(t_end > 0.0, "t_end must be positive");
  require(points >= 2, "a sample grid needs at least two points");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = t_end * i / (points - 1);
  return grid;
}

TrajectoryRecord simulate_trajectory(const Landscape& landscape,
                                     const CompetenceMatrix& competence,
                                     const Multiplex& network, const Coupling& coupling,
                                     double t_end, std::span<const double> grid,
                                     std::uint64_t seed, TrajectoryOptions options) {
  require(t_end > 0.0, "t_end must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 0.0 && grid[i] <= t_end, "sample grid must lie within [0, t_end]");
    require(i == 0 || grid[i] > grid[i - 1], "sample grid must be strictly increasing");
  }

  Rng rng = make_rng(seed);
  Rng measure = make_rng(derive_seed(seed, stream::measurement));

  TrajectoryRecord record;
  record.grid.assign(grid.begin(), grid.end());
  record.fitness.reserve(grid.size());
  record.consensus.reserve(grid.size());
  record.seed = seed;
  record.coupling = coupling;
  record.t_end = t_end;

  Simulator sim(landscape, competence, network, coupling,
                GroupState::random(network.members(), landscape.n(), rng));

  std::size_t next_sample = 0;
  auto sample_until = [&](double limit) {
    while (next_sample < grid.size() && grid[next_sample] < limit) {
      record.fitness.push_back(group_fitness(sim.state(), landscape, measure));
      record.consensus.push_back(consensus(sim.state()));
      ++next_sample;
    }
  };

  // The initial state is in force at t = 0.
  if (!grid.empty() && grid[0] == 0.0) {
    record.fitness.push_back(group_fitness(sim.state(), landscape, measure));
    record.consensus.push_back(consensus(sim.state()));
    next_sample = 1;
  }

  while (true) {
    const Step step = sim.draw(rng);
    const double t_next = sim.time() + step.dt;
    if (t_next > t_end) break;
    sample_until(t_next);
    sim.apply(step);
    if (options.record_event_times) record.event_times.push_back(sim.time());
  }
  sample_until(std::numeric_limits<double>::infinity());
  record.events = sim.events();
  return record;
}

}  // namespace nkgroup
