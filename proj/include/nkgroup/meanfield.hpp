#pragma once

#include <vector>

namespace nkgroup {

enum class Stability { stable, marginal, unstable };

const char* to_string(Stability s);

struct FixedPoint {
  double magnetization;
  Stability stability;
};

// Solutions of m = tanh(x m) for x = M betaJ, ordered by magnetization.
struct MeanFieldSolution {
  double coupling = 0.0;
  std::vector<FixedPoint> fixed_points;
};

/// {0} for x <= 1 (marginal at x == 1); {-m*, 0, +m*} for x > 1 with the
/// nonzero root found by bisection on m - tanh(x m) over [1e-6, 1].
MeanFieldSolution magnetization_fixed_points(double x, double tol = 1e-13);

/// Positive root m*(x), or 0 when x <= 1.
double spontaneous_magnetization(double x, double tol = 1e-13);

/// (betaJ)_c = 1 / M.
double critical_coupling(int members);

struct MagnetizationCurve {
  std::vector<double> time;
  std::vector<double> magnetization;
};

/// Classical RK4 integration of dm/dt = -m + tanh(x m) from m0 with a fixed
/// step. Rejects steps with dt (1 + x) > 2, where the scheme stops being
/// reliably stable.
MagnetizationCurve integrate_mean_field(double m0, double x, double t_end, double dt = 0.01);

}  // namespace nkgroup
