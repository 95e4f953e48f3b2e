#include <doctest.h>

#include <cmath>

#include "popot/admissibility.hpp"
#include "popot/cost.hpp"
#include "popot/law.hpp"
#include "popot/measure.hpp"
#include "popot/state.hpp"

using namespace popot;

TEST_CASE("state spaces") {
  CHECK(in_space(Age{0.0}));
  CHECK_FALSE(in_space(Age{-0.1}));
  CHECK(in_space(AgeState{1.0, 2}, 2));
  CHECK_FALSE(in_space(AgeState{1.0, 3}, 2));
  CHECK_FALSE(in_space(AgeState{1.0, 0}));
  CHECK(in_space(TimePair{0.0, 0.5}));
  CHECK_FALSE(in_space(TimePair{0.5, 0.5}));
  CHECK_FALSE(in_space(AgeSize{1.0, -1.0}));
  CHECK(in_space(Trait{Vec{-1.0, 2.0}}));
  CHECK_THROWS_AS(Vec(4), std::invalid_argument);

  const StatePoint p = AgePosition{1.5, Vec{2.0, -3.0}};
  CHECK(space_of(p) == Space::age_position);
  CHECK(coordinates(p) == std::vector<double>{1.5, 2.0, -3.0});
  CHECK(state_from_coordinates(Space::age_position, {1.5, 2.0, -3.0}) == p);
  CHECK(space_from_string(to_string(Space::time_pair)) == Space::time_pair);
  CHECK(ordering_key(AgeState{0.5, 2}) == std::vector<double>{2.0, 0.5});
}

TEST_CASE("costs") {
  const auto c = CostFunction::trunc_abs(1.0);
  CHECK(c(Age{0.0}, Age{3.0}) == 1.0);
  CHECK(c(Age{0.0}, Age{0.25}) == 0.25);
  CHECK(c(Age{2.0}, Age{2.0}) == 0.0);

  const auto s = CostFunction::trunc_abs_state(2.0);
  CHECK(s(AgeState{0.0, 1}, AgeState{0.5, 1}) == 0.5);
  CHECK(s(AgeState{0.0, 1}, AgeState{0.0, 2}) == 2.0);

  const auto sum = CostFunction::trunc_sum(5.0);
  CHECK(sum(AgeSize{1.0, 2.0}, AgeSize{2.0, 4.0}) == doctest::Approx(3.0));
  CHECK(sum(AgePosition{0.0, Vec{0.0, 0.0}}, AgePosition{1.0, Vec{3.0, 4.0}}) == doctest::Approx(5.0));

  const auto w = CostFunction::trunc_weighted(10.0);
  CHECK(w(TimePair{0.0, 1.0}, TimePair{1.0, 3.0}) == doctest::Approx(4.0));

  const auto p2 = CostFunction::power(2.0);
  CHECK(p2(Trait{Vec{0.0, 0.0}}, Trait{Vec{3.0, 4.0}}) == doctest::Approx(25.0));
  CHECK_FALSE(p2.is_metric());
  CHECK(CostFunction::power(1.0).is_metric());

  CHECK(c.supports(Space::age));
  CHECK_FALSE(c.supports(Space::age_state));
  CHECK_THROWS_AS(c(StatePoint{Age{0.0}}, StatePoint{AgeSize{0.0, 0.0}}), std::invalid_argument);
  CHECK(cost_kind_from_string("trunc_sum") == CostKind::trunc_sum);
}

TEST_CASE("empirical measure construction") {
  CHECK_THROWS_AS(EmpiricalMeasure<Age>({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure<Age>({{0.0}, {1.0}}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure<Age>({{0.0}}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure<Age>({{-1.0}}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalMeasure<StatePoint>({Age{0.0}, AgeSize{0.0, 1.0}}, {0.5, 0.5}),
                  std::invalid_argument);

  // Large uniform clouds must pass the weight check despite rounding.
  std::vector<Age> many(100000, Age{1.0});
  CHECK(EmpiricalMeasure<Age>::uniform(std::move(many)).size() == 100000);
}

TEST_CASE("sampling an empirical measure") {
  Stream rng = stream_for(1, 0);
  const auto dirac = EmpiricalMeasure<Age>::uniform({{0.0}});
  for (const Age& a : dirac.sample(3, rng)) CHECK(a.x == 0.0);

  const EmpiricalMeasure<Age> degenerate({{1.0}, {2.0}}, {1.0, 0.0});
  for (const Age& a : degenerate.sample(5, rng)) CHECK(a.x == 1.0);

  const auto coin = EmpiricalMeasure<Age>::uniform({{0.0}, {1.0}});
  std::size_t first = 0;
  for (const Age& a : coin.sample(100000, rng)) first += a.x == 0.0;
  CHECK(std::abs(first / 1e5 - 0.5) < 0.01);

  Stream r1 = stream_for(9, 3), r2 = stream_for(9, 3);
  CHECK(coin.sample(50, r1) == coin.sample(50, r2));
  CHECK_THROWS_AS(coin.sample(0, rng), std::invalid_argument);
}

TEST_CASE("laws") {
  Stream rng = stream_for(2, 0);
  const Law u = Law::uniform(1.0, 3.0);
  CHECK(u.mean() == doctest::Approx(2.0));
  CHECK(u.second_moment() == doctest::Approx(13.0 / 3.0));
  const Law p = Law::power(0.0, 1.0, 2.0);
  CHECK(p.mean() == doctest::Approx(0.75));
  double s = 0;
  for (int k = 0; k < 100000; ++k) s += p.sample(rng);
  CHECK(s / 1e5 == doctest::Approx(0.75).epsilon(0.01));

  const Law atoms = Law::atoms({0.0, 2.0}, {0.25, 0.75});
  CHECK(atoms.mean() == doctest::Approx(1.5));
  const Expectation e = atoms.expect_min_abs_affine(1.0, 1.0, -0.5);
  CHECK(e.value == doctest::Approx(0.25 * 0.5 + 0.75 * 1.0));
  CHECK_FALSE(e.quadrature);
  CHECK(u.expect_min_abs_affine(10.0, 1.0, -2.0).value == doctest::Approx(0.5));

  const VectorLaw box = VectorLaw::product({Law::uniform(0, 1), Law::uniform(0, 2)});
  CHECK(box.dim() == 2);
  CHECK(box.mean()[1] == doctest::Approx(1.0));
  CHECK(box.expect([](const Vec& v) { return v[0] * v[1]; }).value == doctest::Approx(0.5));

  CHECK_THROWS(FragmentRatio(Law::dirac(1.0)));
  CHECK(FragmentRatio(Law::uniform(0, 1)).mean_ratio() == doctest::Approx(0.5));
  CHECK_THROWS(MatingMix(Law::uniform(0, 1), 0.3, 1.0));
  CHECK(MatingMix(Law::uniform(0, 1), 1.0).theta() == doctest::Approx(0.5));
}

TEST_CASE("admissibility of the truncation level") {
  const GridSpec grid{0.0, 10.0, 501, 32};

  const auto constant = admissible_a(constant_rate(1.0), 5.0, grid);
  CHECK(constant.valid);
  CHECK_FALSE(constant.witness);

  const auto linear = admissible_a(power_rate(0.0, 1.0, 1.0), 1.0, grid);
  CHECK_FALSE(linear.valid);
  REQUIRE(linear.witness);
  CHECK(linear.witness->first[0] < 0.05);
  CHECK(linear.witness->second[0] < 0.05);

  const auto affine = admissible_a(power_rate(1.0, 1.0, 1.0), 1.0, grid);
  CHECK(affine.valid);
  CHECK(affine.min_ratio >= 1.0);

  // Nested candidates stay valid.
  const ScalarRate quad = power_rate(1.0, 0.5, 2.0);
  for (double a : {0.8, 0.4, 0.2}) {
    if (admissible_a(quad, a, grid).valid) CHECK(admissible_a(quad, a / 2, grid).valid);
  }
}

TEST_CASE("suggested truncation passes validation") {
  const GridSpec grid{0.0, 10.0, 401, 32};
  for (double alpha : {0.5, 1.0, 2.0})
    for (double beta : {0.0, 0.5, 2.0})
      for (double p : {1.0, 1.5, 2.0}) {
        const ScalarRate d = power_rate(alpha, beta, p);
        const double a = suggest_a(d, grid);
        CHECK(a > 0);
        CHECK(a <= 0.9 + 1e-15);
        CHECK(admissible_a(d, a, grid).valid);
      }
  // The infimum is 0 near the origin; the grid only resolves it to its spacing.
  CHECK(suggest_a(power_rate(0.0, 1.0, 1.0), grid) < 0.05);
  CHECK_THROWS_AS(suggest_a(power_rate(0.0, 1.0, 1.0), GridSpec{0.0, 10.0, 401, 32}, 0.0), std::domain_error);
}
