#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "popot/cost.hpp"
#include "popot/transport.hpp"

using namespace popot;

namespace {

EmpiricalMeasure<Age> uniform_ages(std::vector<double> xs) {
  std::vector<Age> atoms;
  for (double x : xs) atoms.push_back({x});
  return EmpiricalMeasure<Age>::uniform(std::move(atoms));
}

}  // namespace

TEST_CASE("small transport problems") {
  const auto c1 = CostFunction::trunc_abs(1.0);
  CHECK(transport_cost(uniform_ages({0}), uniform_ages({3}), c1).cost == 1.0);

  const auto mu = uniform_ages({0, 2});
  const auto nu = uniform_ages({0.5, 2.1});
  const TransportPlan p = transport_cost(mu, nu, c1);
  CHECK(p.cost == doctest::Approx(0.3).epsilon(1e-12));
  REQUIRE(p.pairs.size() == 2);
  CHECK(p.pairs[0].source == 0);
  CHECK(p.pairs[0].target == 0);
  CHECK(brute_force_cost(mu, nu, c1) == doctest::Approx(0.3).epsilon(1e-12));

  const auto c2 = CostFunction::trunc_abs(2.0);
  const auto left = uniform_ages({0, 1});
  const auto right = uniform_ages({0.9, 10});
  const TransportPlan w = transport_cost(left, right, c2);
  CHECK(std::abs(w.cost - 1.05) <= 1e-12);
  CHECK(w.pairs[0].target == 1);
  CHECK(w.pairs[1].target == 0);
  CHECK(std::abs(brute_force_cost(left, right, c2) - 1.05) <= 1e-12);
}

TEST_CASE("identical marginals cost nothing") {
  const auto c = CostFunction::trunc_abs(1.0);
  const auto mu = uniform_ages({0.3, 4.0, 1.2, 7.5, 2.0});
  const TransportPlan p = transport_cost(mu, mu, c);
  CHECK(p.cost == 0.0);
  for (const auto& e : p.pairs) CHECK(e.source == e.target);
  CHECK(brute_force_cost(mu, mu, c) == 0.0);
  CHECK(brute_force_cost(uniform_ages({1}), uniform_ages({1.5}), c) == 0.5);
}

TEST_CASE("transport is symmetric and bounded by explicit couplings") {
  Stream rng = stream_for(5, 0);
  const auto c = CostFunction::trunc_abs(1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Age> a, b;
    std::vector<double> wa, wb;
    for (int k = 0; k < 7; ++k) {
      a.push_back({10 * uniform01(rng)});
      wa.push_back(uniform01(rng) + 0.1);
    }
    for (int k = 0; k < 5; ++k) {
      b.push_back({10 * uniform01(rng)});
      wb.push_back(uniform01(rng) + 0.1);
    }
    const auto normalize = [](std::vector<double>& w) {
      double s = 0;
      for (double v : w) s += v;
      for (double& v : w) v /= s;
    };
    normalize(wa);
    normalize(wb);
    const EmpiricalMeasure<Age> mu(a, wa), nu(b, wb);
    const TransportPlan ab = transport_cost(mu, nu, c);
    const TransportPlan ba = transport_cost(nu, mu, c);
    CHECK(ab.cost == ba.cost);
    const CostMatrix m = detail::build_matrix(mu, nu, c);
    CHECK(marginal_error(ab, wa, wb) < 1e-12);
    double product = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) product += wa[i] * wb[j] * m(i, j);
    CHECK(ab.cost <= product + 1e-12);
    CHECK(plan_cost(ab, m) == doctest::Approx(ab.cost).epsilon(1e-12));
  }
}

TEST_CASE("untruncated distance on the line matches sorted pairing") {
  Stream rng = stream_for(6, 0);
  const auto w1 = CostFunction::power(1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs, ys;
    for (int k = 0; k < 20; ++k) {
      xs.push_back(10 * uniform01(rng));
      ys.push_back(10 * uniform01(rng));
    }
    const double cost = transport_cost(uniform_ages(xs), uniform_ages(ys), w1).cost;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double sorted = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) sorted += std::abs(xs[k] - ys[k]) / 20.0;
    CHECK(cost == doctest::Approx(sorted).epsilon(1e-10));
  }
}

TEST_CASE("assignment agrees with brute force") {
  Stream rng = stream_for(7, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    CostMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = std::min(1.0, 3 * uniform01(rng));
    const std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const TransportPlan a = solve_assignment(m);
    const TransportPlan s = solve_network_simplex(w, w, m);
    const double brute = brute_force_assignment(m);
    CHECK(std::abs(a.cost - brute) <= 1e-10);
    CHECK(std::abs(s.cost - brute) <= 1e-10);
  }
}

TEST_CASE("network simplex handles unequal sizes and zero weights") {
  CostMatrix m(2, 3);
  const double v[2][3] = {{0, 1, 2}, {2, 1, 0}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[i][j];
  const std::vector<double> a{0.5, 0.5}, b{0.25, 0.5, 0.25};
  const TransportPlan p = solve_network_simplex(a, b, m);
  CHECK(p.cost == doctest::Approx(0.5));
  CHECK(marginal_error(p, a, b) < 1e-12);

  const std::vector<double> a0{1.0, 0.0};
  const TransportPlan q = solve_network_simplex(a0, b, m);
  CHECK(q.cost == doctest::Approx(1.0));
  for (const auto& e : q.pairs) CHECK(e.source == 0);
}

TEST_CASE("guards") {
  const auto c = CostFunction::trunc_abs(1.0);
  std::vector<double> nine(9, 1.0);
  CHECK_THROWS_AS(brute_force_cost(uniform_ages(nine), uniform_ages(nine), c), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_cost(uniform_ages({1, 2}), uniform_ages({1}), c), std::invalid_argument);
  TransportOptions small;
  small.atom_cap = 2;
  CHECK_THROWS_AS(transport_cost(uniform_ages({1, 2, 3}), uniform_ages({1}), c, small), std::length_error);
  const auto sc = CostFunction::trunc_abs(1.0);
  CHECK_THROWS_AS(transport_cost(EmpiricalMeasure<StatePoint>::uniform({Age{0.0}}),
                                 EmpiricalMeasure<StatePoint>::uniform({AgeSize{0.0, 0.0}}), sc),
                  std::invalid_argument);
}

TEST_CASE("sampling from a plan") {
  const auto c = CostFunction::trunc_abs(1.0);
  Stream rng = stream_for(8, 0);

  const auto mu = uniform_ages({0.5, 1.5, 4.0});
  for (const auto& [x, y] : sample_plan(transport_cost(mu, mu, c), mu, mu, 100, rng)) CHECK(x == y);

  const auto d0 = uniform_ages({0}), d3 = uniform_ages({3});
  for (const auto& [x, y] : sample_plan(transport_cost(d0, d3, c), d0, d3, 10, rng)) {
    CHECK(x.x == 0.0);
    CHECK(y.x == 3.0);
  }

  const auto a = uniform_ages({0, 2}), b = uniform_ages({0.5, 2.1});
  std::size_t hits = 0;
  for (const auto& [x, y] : sample_plan(transport_cost(a, b, c), a, b, 100000, rng))
    hits += x.x == 0.0 && y.x == 0.5;
  CHECK(std::abs(hits / 1e5 - 0.5) < 0.01);

  CHECK_THROWS_AS(sample_plan(TransportPlan{}, a, b, 1, rng), std::invalid_argument);
}
