#pragma once

#include <span>
#include <vector>

#include "nkgroup/dynamics.hpp"
#include "nkgroup/landscape.hpp"
#include "nkgroup/multiplex.hpp"
#include "nkgroup/rng.hpp"

namespace nkgroup {

/// Group decision by majority on each layer; an exact tie is settled by a
/// fair coin drawn from `rng`.
DecisionVector majority_decision(const GroupState& state, Rng& rng);

/// True fitness of the majority decision.
double group_fitness(const GroupState& state, const Landscape& landscape, Rng& rng);

/// Mean over layers of the squared average opinion. 1 at full agreement.
double consensus(const GroupState& state);

/// Pointwise ensemble statistics of one observable.
struct ObservableCurve {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> std_error;  // sample std / sqrt(count); 0 when count == 1
  int count = 0;
};

/// Mean and standard error across rows that share `grid`.
ObservableCurve average_curves(std::span<const double> grid,
                               std::span<const std::vector<double>> rows);

struct EnsembleCurves {
  ObservableCurve fitness;    // V / V_max, normalized per realization
  ObservableCurve consensus;
};

/// Ensemble averages of records sharing one grid. Each record's fitness is
/// divided by its own v_max.
EnsembleCurves ensemble_average(std::span<const TrajectoryRecord> records);

struct SteadyState {
  double value = 0.0;
  bool converged = false;
  double t_reached = 0.0;   // end of the accepted window
  double window_begin = 0.0;
  double window_end = 0.0;
};

/// Time averages over consecutive windows of length `window`, starting at
/// the first grid point. Converged once two consecutive averages differ by
/// less than `tol`; the later window's average is the value. Otherwise the
/// last complete window is reported with converged == false.
SteadyState steady_state_value(const ObservableCurve& curve, double window, double tol);

/// Mean of values whose grid time lies in [begin, end).
double window_average(std::span<const double> grid, std::span<const double> values,
                      double begin, double end);

/// Logistic fit y ~ base + height / (1 + exp(-(x - center) / width)).
struct TransitionFit {
  double center = 0.0;     // location of steepest rise
  double width = 0.0;
  double base = 0.0;
  double height = 0.0;
  double max_slope = 0.0;  // height / (4 width), the slope at the center
  double rss = 0.0;
};

/// Least-squares sigmoid through (x, y): grid search over center and width,
/// with base and height solved in closed form at each grid point, then a
/// finer pass around the best cell. Needs at least four points.
TransitionFit fit_transition(std::span<const double> x, std::span<const double> y);

/// Midpoint of the steepest finite-difference segment of y(x).
double steepest_segment(std::span<const double> x, std::span<const double> y);

}  // namespace nkgroup
