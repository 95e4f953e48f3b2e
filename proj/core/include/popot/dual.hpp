#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "popot/functions.hpp"
#include "popot/measure.hpp"
#include "popot/state.hpp"

namespace popot {

/// Source term S(x, t).
using SourceFunction = std::function<double(double x, double t)>;

/// Backward problem
///   -d_t psi - g d_x psi + d psi = psi(0, t) d + S,   psi(x, T) = 0.
struct DualProblem {
  GrowthFunction g = GrowthFunction::constant(1.0);
  ScalarRate d = constant_rate(0.0);
  SourceFunction source;
  double horizon = 1.0;
  /// S(x, t) = 0 for x >= source_radius.
  double source_radius = 1.0;
  /// Box used for sup-norm diagnostics.
  double diagnostic_hi = 10.0;
};

struct DualSolution {
  double horizon = 0;
  double step = 0;
  /// psi(0, t_j) on t_j = j * step, j = 0..M.
  std::vector<double> psi0;
  /// source_radius + T sup|g| over the diagnostic box.
  double support_radius = 0;
  /// Observed sup|psi| / sup|S| on the grid (0 when S vanishes).
  double c_of_t = 0;

  double time(std::size_t j) const { return step * static_cast<double>(j); }
  /// Linear interpolation of psi(0, .) on [0, T].
  double psi0_at(double t) const;
};

/// Characteristic X_s with X_t = x at each time of `s_grid` (all >= t),
/// integrated with RK4 (closed form for constant or affine g). Throws
/// std::runtime_error if a value falls below -1e-9.
std::vector<double> characteristics(const GrowthFunction& g, double x, double t,
                                    const std::vector<double>& s_grid);

/// Backward trapezoid marching for psi(0, .) with step T / round(T / h_t).
/// Throws std::domain_error when the implicit step is not solvable
/// (1 - h d(0) / 2 <= 0) or a value overflows.
DualSolution solve_volterra(const DualProblem& problem, double h_t);

/// psi(x, t) by trapezoid quadrature along the characteristic from (x, t).
/// Throws std::out_of_range for t outside [0, T].
double evaluate_psi(const DualProblem& problem, const DualSolution& solution, double x, double t);

struct DualityCheck {
  /// Monte-Carlo estimate of int_0^T E[S(X_t, t)] dt.
  double lhs = 0;
  /// int psi(x, 0) u0(dx).
  double rhs = 0;
  double mc_stderr = 0;
  double budget = 0;
  double tolerance = 0;
  bool passed = false;
};

/// Renewal dynamics with b = delta_0. Each trajectory integrates S along its
/// flow segments with 16-point Gauss-Legendre; trajectory k uses stream k of
/// the dynamics family. `budget` is the discretization allowance added to
/// 3 standard errors, plus a 1e-12 relative round-off floor.
DualityCheck duality_crosscheck(const DualProblem& problem, const EmpiricalMeasure<Age>& u0,
                                std::size_t n_particles, std::uint64_t seed, double h_t,
                                double budget, unsigned workers = 1);

/// Rate of convergence log2(e(h) / e(h/2)).
double observed_order(double coarse_error, double fine_error);

}  // namespace popot
