#include "nkgroup/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "nkgroup/error.hpp"

namespace nkgroup {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::marginal:
      return "marginal";
    case Stability::unstable:
      return "unstable";
  }
  return "unknown";
}

double spontaneous_magnetization(double x, double tol) {
  require(std::isfinite(x) && x >= 0.0, "coupling M*betaJ must be finite and >= 0");
  require(tol > 0.0, "tolerance must be positive");
  if (x <= 1.0) return 0.0;

  // g(m) = m - tanh(x m) is negative just above 0 and positive at 1.
  auto g = [x](double m) { return m - std::tanh(x * m); };
  double lo = 1e-6;
  double hi = 1.0;
  if (g(lo) >= 0.0) {
    // x so close to 1 that the root sits below the bracket.
    lo = 0.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < tol) break;
  }
  return 0.5 * (lo + hi);
}

MeanFieldSolution magnetization_fixed_points(double x, double tol) {
  MeanFieldSolution sol;
  sol.coupling = x;
  const double m = spontaneous_magnetization(x, tol);
  if (m <= 0.0) {
    sol.fixed_points.push_back({0.0, x < 1.0 ? Stability::stable : Stability::marginal});
    return sol;
  }
  sol.fixed_points = {{-m, Stability::stable}, {0.0, Stability::unstable}, {m, Stability::stable}};
  return sol;
}

double critical_coupling(int members) {
  require(members >= 1, "M must be positive");
  return 1.0 / members;
}

MagnetizationCurve integrate_mean_field(double m0, double x, double t_end, double dt) {
  require(std::abs(m0) <= 1.0, "initial magnetization must lie in [-1, 1]");
  require(std::isfinite(x) && x >= 0.0, "coupling must be finite and >= 0");
  require(t_end > 0.0, "t_end must be positive");
  require(dt > 0.0, "step must be positive");
  require(dt * (1.0 + x) <= 2.0, "step too large for a stable integration at this coupling");

  auto rhs = [x](double m) { return -m + std::tanh(x * m); };
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  MagnetizationCurve curve;
  curve.time.reserve(steps + 1);
  curve.magnetization.reserve(steps + 1);
  double m = m0;
  curve.time.push_back(0.0);
  curve.magnetization.push_back(m);
  for (long i = 1; i <= steps; ++i) {
    const double h = std::min(dt, t_end - curve.time.back());
    const double k1 = rhs(m);
    const double k2 = rhs(m + 0.5 * h * k1);
    const double k3 = rhs(m + 0.5 * h * k2);
    const double k4 = rhs(m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    curve.time.push_back(i == steps ? t_end : i * dt);
    curve.magnetization.push_back(m);
  }
  return curve;
}

}  // namespace nkgroup
