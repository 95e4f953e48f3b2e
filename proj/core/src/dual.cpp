#include "popot/dual.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "popot/pdmp.hpp"
#include "popot/stats.hpp"

namespace popot {

namespace {

constexpr double kMaxFlowStep = 0.01;
constexpr double kUndershoot = -1e-9;

// Renewal dynamics on [0, inf) with every jump going to 0.
struct RestartDynamics {
  using State = double;
  const GrowthFunction& g;
  const ScalarRate& d;

  double flow(double x, double dt) const { return g.flow(x, dt); }
  double rate(double x) const { return d(x); }
  double rate_bound(double x, double window) const { return d.interval_bound(x, flow(x, window)); }
  double jump(double, Stream&) const { return 0.0; }
};

double advance(const GrowthFunction& g, double x, double dt) {
  if (dt <= 0) return x;
  if (g.kind() != GrowthFunction::Kind::general) return g.flow(x, dt);
  const auto steps = static_cast<std::size_t>(std::ceil(dt / kMaxFlowStep));
  const double h = dt / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) x = g.rk4_step(x, h);
  return x;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string("dual solver overflow in ") + what);
}

}  // namespace

double DualSolution::psi0_at(double t) const {
  if (psi0.empty()) return 0;
  if (t <= 0) return psi0.front();
  if (t >= horizon) return psi0.back();
  const double u = t / step;
  const auto j = std::min(static_cast<std::size_t>(u), psi0.size() - 2);
  const double f = u - static_cast<double>(j);
  return (1 - f) * psi0[j] + f * psi0[j + 1];
}

std::vector<double> characteristics(const GrowthFunction& g, double x, double t,
                                    const std::vector<double>& s_grid) {
  std::vector<double> out;
  out.reserve(s_grid.size());
  double s = t;
  for (double next : s_grid) {
    if (next < s) throw std::invalid_argument("characteristic grid must be sorted and start at t");
    x = advance(g, x, next - s);
    if (x < kUndershoot) throw std::runtime_error("characteristic left [0, inf)");
    x = std::max(x, 0.0);
    out.push_back(x);
    s = next;
  }
  return out;
}

DualSolution solve_volterra(const DualProblem& p, double h_t) {
  if (!(p.horizon > 0)) throw std::invalid_argument("horizon must be > 0");
  if (!(h_t > 0)) throw std::invalid_argument("time step must be > 0");
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(p.horizon / h_t)));
  const double h = p.horizon / static_cast<double>(m);

  std::vector<double> tau(m + 1);
  for (std::size_t k = 0; k <= m; ++k) tau[k] = h * static_cast<double>(k);
  // The kernel only depends on tau because g and d do not depend on time.
  const std::vector<double> phi = characteristics(p.g, 0.0, 0.0, tau);
  std::vector<double> dphi(m + 1), kernel(m + 1);
  double cum = 0;
  for (std::size_t k = 0; k <= m; ++k) {
    dphi[k] = p.d(phi[k]);
    if (k > 0) cum += 0.5 * h * (dphi[k - 1] + dphi[k]);
    kernel[k] = std::exp(-cum);
  }

  const double denom = 1 - 0.5 * h * dphi[0];
  if (!(denom > 0)) throw std::domain_error("implicit step not solvable; reduce h_t");

  DualSolution sol;
  sol.horizon = p.horizon;
  sol.step = h;
  sol.psi0.assign(m + 1, 0.0);
  for (std::size_t j = m; j-- > 0;) {
    const double tj = h * static_cast<double>(j);
    double sum = 0.5 * p.source(0.0, tj);
    for (std::size_t k = j + 1; k <= m; ++k) {
      const std::size_t l = k - j;
      const double f = kernel[l] * (sol.psi0[k] * dphi[l] + p.source(phi[l], h * static_cast<double>(k)));
      sum += k == m ? 0.5 * f : f;
    }
    sol.psi0[j] = h * sum / denom;
    require_finite(sol.psi0[j], "psi(0, t)");
  }

  const double vmax = p.g.sup_abs(0, p.diagnostic_hi);
  sol.support_radius = p.source_radius + p.horizon * vmax;

  // Sup-norm ratio on a coarse diagnostic grid.
  constexpr std::size_t kGrid = 21;
  double sup_s = 0, sup_psi = 0;
  for (std::size_t a = 0; a < kGrid; ++a) {
    const double x = p.diagnostic_hi * static_cast<double>(a) / (kGrid - 1);
    for (std::size_t b = 0; b < kGrid; ++b) {
      const double t = p.horizon * static_cast<double>(b) / (kGrid - 1);
      sup_s = std::max(sup_s, std::abs(p.source(x, t)));
      sup_psi = std::max(sup_psi, std::abs(evaluate_psi(p, sol, x, t)));
    }
  }
  for (double v : sol.psi0) sup_psi = std::max(sup_psi, std::abs(v));
  sol.c_of_t = sup_s > 0 ? sup_psi / sup_s : 0.0;
  return sol;
}

double evaluate_psi(const DualProblem& p, const DualSolution& sol, double x, double t) {
  const double slack = 1e-12 * std::max(1.0, sol.horizon);
  if (!(t >= -slack && t <= sol.horizon + slack)) throw std::out_of_range("t outside [0, T]");
  if (!(x >= 0)) throw std::out_of_range("x must be >= 0");
  t = std::clamp(t, 0.0, sol.horizon);
  const double span = sol.horizon - t;
  if (span <= 0) return 0.0;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / sol.step - 1e-9)));
  const double h = span / static_cast<double>(n);
  std::vector<double> s(n + 1);
  for (std::size_t k = 0; k <= n; ++k) s[k] = k == n ? sol.horizon : t + h * static_cast<double>(k);
  const std::vector<double> xs = characteristics(p.g, x, t, s);
  double cum = 0, prev_d = 0, total = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double dk = p.d(xs[k]);
    if (k > 0) cum += 0.5 * h * (prev_d + dk);
    prev_d = dk;
    const double f = std::exp(-cum) * (sol.psi0_at(s[k]) * dk + p.source(xs[k], s[k]));
    total += (k == 0 || k == n) ? 0.5 * f : f;
  }
  return h * total;
}

DualityCheck duality_crosscheck(const DualProblem& p, const EmpiricalMeasure<Age>& u0,
                                std::size_t n_particles, std::uint64_t seed, double h_t,
                                double budget, unsigned workers) {
  if (n_particles < 2) throw std::invalid_argument("need at least 2 trajectories");
  const DualSolution sol = solve_volterra(p, h_t);
  const RestartDynamics dyn{p.g, p.d};
  using Rule = boost::math::quadrature::gauss<double, 16>;
  std::vector<double> values(n_particles);
  detail::parallel_for(n_particles, workers, [&](std::size_t k) {
    Stream init = stream_for(seed, k, kInitialStream);
    Stream rng = stream_for(seed, k, kDynamicsStream);
    const double x0 = u0.atom(u0.sample_index(init)).x;
    double acc = 0;
    for (const auto& seg : simulate_path(dyn, x0, p.horizon, 0.1, rng)) {
      const double len = seg.end - seg.start;
      if (len <= 0) continue;
      acc += Rule::integrate(
          [&](double u) {
            const double dt = 0.5 * len * (u + 1);
            return p.source(p.g.flow(seg.state, dt), seg.start + dt);
          },
          -1.0, 1.0) * 0.5 * len;
    }
    values[k] = acc;
  });

  DualityCheck out;
  out.lhs = mean(values);
  out.mc_stderr = standard_error(values);
  for (std::size_t k = 0; k < u0.size(); ++k)
    out.rhs += u0.weight(k) * evaluate_psi(p, sol, u0.atom(k).x, 0.0);
  out.budget = budget;
  // Round-off floor for deterministic cases where both error terms vanish.
  out.tolerance = 3 * out.mc_stderr + budget + 1e-12 * std::max(1.0, std::abs(out.rhs));
  out.passed = std::abs(out.lhs - out.rhs) <= out.tolerance;
  return out;
}

double observed_order(double coarse_error, double fine_error) {
  if (!(coarse_error > 0) || !(fine_error > 0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse_error / fine_error);
}

}  // namespace popot
