#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nkgroup/landscape.hpp"
#include "nkgroup/multiplex.hpp"
#include "nkgroup/rng.hpp"

namespace nkgroup {

inline constexpr double kMaxBetaPrime = 100.0;

/// Glauber factor (1/2)[1 - s_l tanh(betaJ * h_l)], h_l the sum of the
/// neighbor opinions in l's layer.
double glauber_factor(const GroupState& state, int index, double beta_j,
                      const Multiplex& network);

/// Change of the flipping member's perceived fitness when opinion `index`
/// flips. Only the contributions that contain the flipped decision are
/// evaluated.
double payoff_delta(const GroupState& state, int index, const Landscape& landscape,
                    const CompetenceMatrix& competence);

/// Flip rate of opinion `index`: glauber_factor * exp(beta' * payoff_delta).
double transition_rate(const GroupState& state, int index, const Coupling& coupling,
                       const Multiplex& network, const Landscape& landscape,
                       const CompetenceMatrix& competence);

struct RateVector {
  std::vector<double> rates;
  double total = 0.0;
};

/// All n flip rates computed from scratch.
RateVector compute_rates(const GroupState& state, const Coupling& coupling,
                         const Multiplex& network, const Landscape& landscape,
                         const CompetenceMatrix& competence);

struct Step {
  int index;
  double dt;
};

/// One event of the direct method: dt = -ln(r)/total with r uniform on (0, 1],
/// then the index found by inverting the cumulative rate sum.
Step gillespie_step(std::span<const double> rates, double total, Rng& rng);

/// Event-driven simulator for one trajectory. Borrows the landscape,
/// competence and network, which must outlive it.
class Simulator {
 public:
  Simulator(const Landscape& landscape, const CompetenceMatrix& competence,
            const Multiplex& network, const Coupling& coupling, GroupState initial);

  const GroupState& state() const { return state_; }
  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  std::span<const double> rates() const { return rates_; }
  double total_rate() const;

  /// Draws the next event without applying it.
  Step draw(Rng& rng) const { return gillespie_step(rates_, total_rate(), rng); }

  /// Applies a drawn event: advances time and flips the opinion.
  void apply(const Step& step);

  /// Flips one opinion and refreshes only the rates it can change: the
  /// Glauber factors of the flipped member and its layer neighbors, and the
  /// payoff factors of that member's decisions coupled to the flipped one.
  void flip(int index);

  Step advance(Rng& rng) {
    const Step step = draw(rng);
    apply(step);
    return step;
  }

 private:
  void refresh_glauber(int index);
  void refresh_payoff(int index);

  const Landscape* landscape_;
  const CompetenceMatrix* competence_;
  const Multiplex* network_;
  Coupling coupling_;
  GroupState state_;
  std::vector<double> glauber_;
  std::vector<double> payoff_;
  std::vector<double> rates_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
};

/// Observables of one realization on a fixed time grid.
struct TrajectoryRecord {
  std::vector<double> grid;
  std::vector<double> fitness;
  std::vector<double> consensus;
  std::vector<double> event_times;  // filled only when requested
  std::uint64_t events = 0;
  std::uint64_t seed = 0;
  double v_max = 0.0;  // set by the caller that knows the optimum
  Coupling coupling;
  double t_end = 0.0;
};

/// Evenly spaced grid 0, ..., t_end with `points` entries.
std::vector<double> make_grid(double t_end, int points);

struct TrajectoryOptions {
  bool record_event_times = false;
};

/// Simulates one realization from a uniformly random initial state up to
/// t_end. The observables at a grid time are those of the state in force just
/// before it. Tie coins of the majority rule come from a measurement stream
/// derived from `seed`, so the dynamics do not depend on the grid.
TrajectoryRecord simulate_trajectory(const Landscape& landscape,
                                     const CompetenceMatrix& competence,
                                     const Multiplex& network, const Coupling& coupling,
                                     double t_end, std::span<const double> grid,
                                     std::uint64_t seed, TrajectoryOptions options = {});

}  // namespace nkgroup
