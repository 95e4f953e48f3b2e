#include <doctest.h>

#include <cmath>

#include "manufactured.hpp"
#include "popot/dual.hpp"

using namespace popot;
using popot::testing::bump;
using popot::testing::Manufactured;

namespace {

DualProblem bump_problem(double rate) {
  DualProblem p;
  p.g = GrowthFunction::constant(1.0);
  p.d = constant_rate(rate);
  p.horizon = 2.0;
  p.source = [](double x, double t) { return bump((x - 1.0) / 0.5) * bump((t - 1.0) / 0.5); };
  p.source_radius = 1.5;
  return p;
}

}  // namespace

TEST_CASE("characteristics") {
  const std::vector<double> s{0.5, 1.0, 2.0, 3.5};
  const auto one = characteristics(GrowthFunction::constant(1.0), 0.25, 0.5, s);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(one[k] == doctest::Approx(0.25 + s[k] - 0.5));

  const auto still = characteristics(GrowthFunction::constant(0.0), 2.0, 0.5, s);
  for (double v : still) CHECK(v == 2.0);

  const auto exact = [](double x, double dt) { return 1 + (x - 1) * std::exp(-dt); };
  const auto affine = characteristics(GrowthFunction::affine(1.0, -1.0), 3.0, 0.5, s);
  const auto rk = characteristics(GrowthFunction::general([](double x) { return 1 - x; }, true), 3.0, 0.5, s);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(affine[k] == doctest::Approx(exact(3.0, s[k] - 0.5)).epsilon(1e-13));
    CHECK(std::abs(rk[k] - exact(3.0, s[k] - 0.5)) < 1e-9);
  }

  CHECK_THROWS_AS(characteristics(GrowthFunction::constant(1.0), 0.0, 1.0, {0.5}), std::invalid_argument);
}

TEST_CASE("homogeneous problem has the zero solution") {
  DualProblem p = bump_problem(1.0);
  p.source = [](double, double) { return 0.0; };
  const DualSolution sol = solve_volterra(p, 0.01);
  for (double v : sol.psi0) CHECK(v == 0.0);
  CHECK(sol.c_of_t == 0.0);
  CHECK(evaluate_psi(p, sol, 0.7, 0.3) == 0.0);
}

TEST_CASE("zero rate reduces to an explicit integral") {
  DualProblem p;
  p.g = GrowthFunction::constant(1.0);
  p.d = constant_rate(0.0);
  p.horizon = 2.0;
  p.source = [](double, double t) { return std::cos(t); };
  const DualSolution sol = solve_volterra(p, 0.01);
  for (std::size_t j = 0; j < sol.psi0.size(); ++j)
    CHECK(std::abs(sol.psi0[j] - (std::sin(2.0) - std::sin(sol.time(j)))) < 1e-4);
  CHECK(sol.support_radius == doctest::Approx(p.source_radius + 2.0));
}

TEST_CASE("manufactured solution converges at second order") {
  const Manufactured ms;
  const double e1 = ms.psi0_error(0.02), e2 = ms.psi0_error(0.01), e3 = ms.psi0_error(0.005);
  CHECK(e2 < e1);
  CHECK(observed_order(e1, e2) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(observed_order(e2, e3) == doctest::Approx(2.0).epsilon(0.15));

  const DualProblem p = ms.problem();
  const DualSolution sol = solve_volterra(p, 0.005);
  for (double x : {0.0, 0.5, 2.0})
    for (double t : {0.0, 0.4, 0.9})
      CHECK(std::abs(evaluate_psi(p, sol, x, t) - ms.psi(x, t)) < 1e-3);
}

TEST_CASE("evaluation at the boundary") {
  DualProblem p = bump_problem(0.0);
  const DualSolution sol = solve_volterra(p, 0.01);
  CHECK(evaluate_psi(p, sol, 0.3, p.horizon) == 0.0);
  CHECK(evaluate_psi(p, sol, 1.5, 0.0) == 0.0);
  CHECK(evaluate_psi(p, sol, 4.0, 0.5) == 0.0);
  CHECK(evaluate_psi(p, sol, 0.0, 0.0) > 0.0);
  CHECK_THROWS_AS(evaluate_psi(p, sol, 0.3, 2.5), std::out_of_range);
  CHECK_THROWS_AS(evaluate_psi(p, sol, -0.3, 0.5), std::out_of_range);
  CHECK(std::isnan(observed_order(0.0, 1.0)));
}

TEST_CASE("stiff rates are rejected") {
  DualProblem p = bump_problem(300.0);
  CHECK_THROWS_AS(solve_volterra(p, 0.01), std::domain_error);
  CHECK_THROWS_AS(solve_volterra(p, 0.0), std::invalid_argument);
}

TEST_CASE("duality cross-check") {
  const auto u0 = EmpiricalMeasure<Age>::uniform({{0.0}});

  DualProblem zero = bump_problem(1.0);
  zero.source = [](double, double) { return 0.0; };
  const DualityCheck z = duality_crosscheck(zero, u0, 100, 1, 0.01, 0.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.passed);

  const DualityCheck transport = duality_crosscheck(bump_problem(0.0), u0, 100, 2, 0.01, 1e-6);
  CHECK(transport.mc_stderr < 1e-12);
  CHECK(std::abs(transport.lhs - transport.rhs) < 1e-6);
  CHECK(transport.passed);

  const DualityCheck renewal = duality_crosscheck(bump_problem(1.0), u0, 20000, 3, 0.01, 1e-3);
  CHECK(renewal.passed);
  CHECK(renewal.tolerance >= 3 * renewal.mc_stderr);
}
