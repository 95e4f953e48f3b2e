#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "popot/dual.hpp"

namespace popot::testing {

// psi(x, t) = (T - t) e^t / (1 + x^2) with g = 1 - x / 10 and d = 1 + x / 2.
struct Manufactured {
  double horizon = 1.0;

  double phi(double x) const { return 1.0 / (1.0 + x * x); }
  double dphi(double x) const { return -2.0 * x / ((1.0 + x * x) * (1.0 + x * x)); }
  double psi(double x, double t) const { return (horizon - t) * std::exp(t) * phi(x); }

  DualProblem problem() const {
    DualProblem p;
    p.g = GrowthFunction::affine(1.0, -0.1);
    p.d = power_rate(1.0, 0.5, 1.0);
    p.horizon = horizon;
    p.source_radius = 10.0;
    const double T = horizon;
    p.source = [T, this](double x, double t) {
      const double e = std::exp(t);
      const double dt = e * phi(x) * (T - t - 1.0);
      const double dx = (T - t) * e * dphi(x);
      const double d = 1.0 + 0.5 * x;
      return -dt - (1.0 - 0.1 * x) * dx + d * psi(x, t) - psi(0.0, t) * d;
    };
    return p;
  }

  double psi0_error(double h_t) const {
    const DualSolution sol = solve_volterra(problem(), h_t);
    double err = 0;
    for (std::size_t j = 0; j < sol.psi0.size(); ++j)
      err = std::max(err, std::abs(sol.psi0[j] - psi(0.0, sol.time(j))));
    return err;
  }
};

// (1 - u^2)^4 on |u| < 1.
inline double bump(double u) {
  if (std::abs(u) >= 1) return 0.0;
  const double v = 1 - u * u;
  return v * v * v * v;
}

}  // namespace popot::testing
