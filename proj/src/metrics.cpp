#include "nkgroup/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nkgroup/error.hpp"

namespace nkgroup {

DecisionVector majority_decision(const GroupState& state, Rng& rng) {
  const int n = state.decisions();
  DecisionVector d(n);
  for (int j = 0; j < n; ++j) {
    int sum = 0;
    for (int k = 0; k < state.members(); ++k) sum += state.at(k, j);
    if (sum > 0) {
      d[j] = 1;
    } else if (sum < 0) {
      d[j] = -1;
    } else {
      d[j] = coin(rng) ? Spin{1} : Spin{-1};
    }
  }
  return d;
}

double group_fitness(const GroupState& state, const Landscape& landscape, Rng& rng) {
  return fitness(landscape, majority_decision(state, rng));
}

double consensus(const GroupState& state) {
  const int m = state.members();
  const int n = state.decisions();
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    int sum = 0;
    for (int k = 0; k < m; ++k) sum += state.at(k, j);
    const double mean = static_cast<double>(sum) / m;
    total += mean * mean;
  }
  return total / n;
}

ObservableCurve average_curves(std::span<const double> grid,
                               std::span<const std::vector<double>> rows) {
  require(!rows.empty(), "cannot average an empty ensemble");
  const std::size_t points = grid.size();
  for (const auto& row : rows) {
    require(row.size() == points, "ensemble rows must match the sample grid");
  }
  ObservableCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.mean.assign(points, 0.0);
  curve.std_error.assign(points, 0.0);
  curve.count = static_cast<int>(rows.size());
  const double count = static_cast<double>(rows.size());

  for (std::size_t i = 0; i < points; ++i) {
    double sum = 0.0;
    for (const auto& row : rows) sum += row[i];
    const double mean = sum / count;
    curve.mean[i] = mean;
    if (rows.size() > 1) {
      double ss = 0.0;
      for (const auto& row : rows) ss += (row[i] - mean) * (row[i] - mean);
      curve.std_error[i] = std::sqrt(ss / (count - 1.0) / count);
    }
  }
  return curve;
}

EnsembleCurves ensemble_average(std::span<const TrajectoryRecord> records) {
  require(!records.empty(), "cannot average an empty ensemble");
  const auto& grid = records.front().grid;
  std::vector<std::vector<double>> fitness_rows;
  std::vector<std::vector<double>> consensus_rows;
  fitness_rows.reserve(records.size());
  consensus_rows.reserve(records.size());
  for (const auto& r : records) {
    require(r.grid == grid, "records do not share one sample grid");
    require(r.v_max > 0.0, "record has no positive V_max for normalization");
    std::vector<double> normalized(r.fitness.size());
    for (std::size_t i = 0; i < normalized.size(); ++i) normalized[i] = r.fitness[i] / r.v_max;
    fitness_rows.push_back(std::move(normalized));
    consensus_rows.push_back(r.consensus);
  }
  return {average_curves(grid, fitness_rows), average_curves(grid, consensus_rows)};
}

double window_average(std::span<const double> grid, std::span<const double> values,
                      double begin, double end) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= begin && grid[i] < end) {
      sum += values[i];
      ++count;
    }
  }
  if (count == 0) {
    throw ParameterError("no samples in window [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ")");
  }
  return sum / count;
}

SteadyState steady_state_value(const ObservableCurve& curve, double window, double tol) {
  require(window > 0.0, "window length must be positive");
  require(tol > 0.0, "tolerance must be positive");
  require(curve.grid.size() == curve.mean.size() && curve.grid.size() >= 2,
          "curve needs matching grid and values");
  const double start = curve.grid.front();
  const double span = curve.grid.back() - start;
  // The final grid point closes the last window rather than opening a new one.
  const int windows = static_cast<int>(std::floor(span / window + 1e-9));
  require(windows >= 2, "curve must span at least two windows");

  SteadyState result;
  double previous = window_average(curve.grid, curve.mean, start, start + window);
  for (int w = 1; w < windows; ++w) {
    const double begin = start + w * window;
    const double end = begin + window;
    const double current = window_average(curve.grid, curve.mean, begin, end);
    result.value = current;
    result.window_begin = begin;
    result.window_end = end;
    result.t_reached = end;
    if (std::abs(current - previous) < tol) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
  return result;
}

namespace {

// Closed-form (base, height) for fixed center/width; returns the residual.
double fit_linear_part(std::span<const double> x, std::span<const double> y, double center,
                       double width, double& base, double& height) {
  const auto count = static_cast<double>(x.size());
  double ss = 0.0, sy = 0.0, sss = 0.0, ssy = 0.0;
  std::vector<double> s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = 1.0 / (1.0 + std::exp(-(x[i] - center) / width));
    ss += s[i];
    sy += y[i];
    sss += s[i] * s[i];
    ssy += s[i] * y[i];
  }
  const double det = count * sss - ss * ss;
  if (std::abs(det) < 1e-14) {
    base = sy / count;
    height = 0.0;
  } else {
    height = (count * ssy - ss * sy) / det;
    base = (sy - height * ss) / count;
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = base + height * s[i] - y[i];
    rss += r * r;
  }
  return rss;
}

}  // namespace

TransitionFit fit_transition(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "x and y must have equal length");
  require(x.size() >= 4, "a transition fit needs at least four points");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  require(range > 0.0, "x values must not all coincide");

  TransitionFit best;
  best.rss = std::numeric_limits<double>::infinity();
  auto search = [&](double c_lo, double c_hi, int c_steps, double w_lo, double w_hi,
                    int w_steps) {
    for (int ci = 0; ci <= c_steps; ++ci) {
      const double center = c_lo + (c_hi - c_lo) * ci / c_steps;
      for (int wi = 0; wi <= w_steps; ++wi) {
        const double width = w_lo * std::pow(w_hi / w_lo, static_cast<double>(wi) / w_steps);
        double base = 0.0, height = 0.0;
        const double rss = fit_linear_part(x, y, center, width, base, height);
        if (rss < best.rss) best = {center, width, base, height, 0.0, rss};
      }
    }
  };
  search(lo, lo + range, 400, range / 200.0, range, 120);
  const double c_step = range / 400.0;
  search(best.center - c_step, best.center + c_step, 100, best.width * 0.95, best.width * 1.05,
         50);
  best.max_slope = best.height / (4.0 * best.width);
  return best;
}

double steepest_segment(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "need at least two points");
  double best_slope = -std::numeric_limits<double>::infinity();
  double where = x[0];
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (slope > best_slope) {
      best_slope = slope;
      where = 0.5 * (x[i] + x[i + 1]);
    }
  }
  return where;
}

}  // namespace nkgroup
