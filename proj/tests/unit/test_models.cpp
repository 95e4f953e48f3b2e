#include <doctest.h>

#include <cmath>

#include "popot/checks.hpp"
#include "popot/models.hpp"

using namespace popot;

namespace {

const GridSpec kGrid{0.0, 10.0, 401, 32};

Renewal renewal(ScalarRate d, double a, Law b = Law::dirac(0.0)) {
  return Renewal(GrowthFunction::constant(1.0), std::move(d), BirthLaw(std::move(b)), a);
}

}  // namespace

TEST_CASE("rate splitting") {
  const EventRates c = renewal(constant_rate(2.5), 1.0).event_rates({0.0}, {4.0});
  CHECK(c.common == 2.5);
  CHECK(c.solo_first == 0.0);
  CHECK(c.solo_second == 0.0);

  const EventRates r = renewal(power_rate(1, 1, 1), 1.0).event_rates({0.0}, {2.0});
  CHECK(r.common == 1.0);
  CHECK(r.solo_first == 0.0);
  CHECK(r.solo_second == 2.0);

  const RenewalSystem sys({{GrowthFunction::constant(1), constant_rate(1)},
                           {GrowthFunction::constant(1), constant_rate(1)}},
                          1.0);
  const EventRates mis = sys.event_rates({0.3, 1}, {0.3, 2});
  CHECK(mis.common == 0.0);
  CHECK(mis.solo_first == 1.0);
  CHECK(mis.solo_second == 1.0);
  CHECK_FALSE(sys.aligned({0.3, 1}, {0.3, 2}));

  Stream rng = stream_for(1, 0);
  for (int k = 0; k < 1000; ++k) {
    const double x = 10 * uniform01(rng), y = 10 * uniform01(rng);
    const ScalarRate d = power_rate(0.5, 1.3, 1.7);
    const EventRates e = split_rates(d(x), d(y));
    CHECK(e.common + e.solo_first == doctest::Approx(d(x)).epsilon(1e-14));
    CHECK(e.common + e.solo_second == doctest::Approx(d(y)).epsilon(1e-14));
  }
}

TEST_CASE("jump maps and shared randomness") {
  Stream rng = stream_for(2, 0);
  const Renewal ren = renewal(constant_rate(1), 1.0, Law::uniform(0, 1));
  for (int k = 0; k < 100; ++k) {
    auto [x, y] = ren.coupled_jump({1.0}, {5.0}, EventClass::common, rng);
    CHECK(x == y);
    auto [u, v] = ren.coupled_jump({1.0}, {5.0}, EventClass::solo_first, rng);
    CHECK(v.x == 5.0);
    CHECK(u.x <= 1.0);
  }

  const GrowthFragmentation gf(GrowthFunction::constant(1), power_rate(1, 1, 1),
                               FragmentRatio(Law::uniform(0, 1)), 0.45);
  for (int k = 0; k < 100; ++k) {
    auto [x, y] = gf.coupled_jump({2.0}, {3.0}, EventClass::common, rng);
    CHECK(x.x / 2.0 == doctest::Approx(y.x / 3.0).epsilon(1e-14));
  }

  const SpaceAge sa(constant_rate(1), SpatialNoise(VectorLaw::product({Law::uniform(-1, 1), Law::uniform(-1, 1)}), 0.5), 1.0);
  const AgePosition p{0.2, Vec{1.0, 1.0}}, q{0.7, Vec{-2.0, 0.5}};
  for (int k = 0; k < 100; ++k) {
    auto [x, y] = sa.coupled_jump(p, q, EventClass::common, rng);
    CHECK(x.x == 0.0);
    CHECK(y.x == 0.0);
    const Vec dx = x.z - p.z, dy = y.z - q.z;
    CHECK(dx[0] == doctest::Approx(dy[0]).epsilon(1e-14));
    CHECK(dx[1] == doctest::Approx(dy[1]).epsilon(1e-14));
  }

  const AgeSizeModel as(GrowthFunction::constant(1), power_rate2(1, 1, 1, 1, 1),
                        FragmentRatio(Law::uniform(0, 1)), 0.4);
  for (int k = 0; k < 100; ++k) {
    auto [x, y] = as.coupled_jump({1.0, 2.0}, {0.5, 4.0}, EventClass::common, rng);
    CHECK(x.x == 0.0);
    CHECK(x.z / 2.0 == doctest::Approx(y.z / 4.0).epsilon(1e-14));
  }

  const TwoTime tt(power_rate2(1, 1, 1, 0.5, 1), 0.5);
  CHECK(tt.jump({1.5, 4.0}, rng) == TimePair{0.0, 1.5});
  const TimePair f = tt.flow({1.0, 3.0}, 2.5);
  CHECK(f.x2 - f.x1 == doctest::Approx(2.0));
  auto [a, b] = tt.coupled_jump({1.0, 2.0}, {3.0, 5.0}, EventClass::common, rng);
  CHECK(a == TimePair{0.0, 1.0});
  CHECK(b == TimePair{0.0, 3.0});

  const RenewalSystem sys({{GrowthFunction::constant(1), constant_rate(1)},
                           {GrowthFunction::constant(1), constant_rate(1)}},
                          1.0);
  CHECK(sys.jump({2.0, 2}, rng) == AgeState{0.0, 1});
  CHECK(sys.jump({2.0, 1}, rng) == AgeState{0.0, 2});
}

TEST_CASE("flows") {
  const GrowthFunction g = GrowthFunction::general([](double x) { return 1.0 / (1.0 + x); }, true);
  for (double x : {0.0, 0.7, 3.0}) {
    const double once = g.flow(x, 1.3);
    const double twice = g.flow(g.flow(x, 0.5), 0.8);
    CHECK(once == doctest::Approx(twice).epsilon(1e-8));
    CHECK(once == doctest::Approx(std::sqrt((1 + x) * (1 + x) + 2.6) - 1).epsilon(1e-8));
  }
  const GrowthFunction dec = GrowthFunction::affine(1.0, -0.5);
  for (double x = 0; x < 5; x += 0.5) {
    const double y = x + 0.3;
    double prev = y - x;
    for (double t = 0.2; t < 3; t += 0.2) {
      const double gap = dec.flow(y, t) - dec.flow(x, t);
      CHECK(gap >= 0);
      CHECK(gap <= prev + 1e-14);
      prev = gap;
    }
  }
  CHECK(GrowthFunction::constant(0.0).flow(2.0, 5.0) == 2.0);
  CHECK_THROWS(GrowthFunction::affine(-1.0, 0.0).validate(0, 10, 11));
}

TEST_CASE("coupling inequality for the renewal model") {
  const Renewal flat = renewal(constant_rate(2.0), 1.0, Law::uniform(0, 1));
  CHECK(renewal_I_margin(flat, 0.2, 0.9).value == doctest::Approx(0.7));
  const Renewal ren = renewal(power_rate(1, 1, 1), 1.0);
  CHECK(renewal_I_margin(ren, 2.0, 2.0).value == doctest::Approx(0.0));
  Stream rng = stream_for(3, 0);
  double worst = 1;
  for (int k = 0; k < 10000; ++k)
    worst = std::min(worst, renewal_I_margin(ren, 10 * uniform01(rng), 10 * uniform01(rng)).value);
  CHECK(worst >= -1e-10);
}

TEST_CASE("sign of the drift terms") {
  const RenewalSystem sys({{GrowthFunction::constant(1), power_rate(1, 1, 1)},
                           {GrowthFunction::constant(1), power_rate(2, 1, 1)}},
                          0.9);
  CHECK(renewal_system_delta(sys, 1, 1.5, 1.5).value == doctest::Approx(0.0));

  const SpaceAge sa(constant_rate(1.5), SpatialNoise(VectorLaw::product({Law::uniform(-1, 1)}), 1.0), 1.0);
  const AgePosition p{0.2, Vec{0.0}}, q{0.5, Vec{0.4}};
  const double expected = -1.5 * std::min(0.3 + 0.4, 1.0) + 1.5 * std::min(0.4, 1.0);
  const double delta = space_age_delta(sa, p, q).value;
  CHECK(delta <= 1e-12);
  CHECK(delta == doctest::Approx(expected));

  const FragmentRatio beta(Law::uniform(0, 1));
  const double a = suggest_a(power_rate(1, 1, 1), kGrid, 1 - beta.mean_ratio());
  const GrowthFragmentation gf(GrowthFunction::constant(1), power_rate(1, 1, 1), beta, a);
  Stream rng = stream_for(4, 0);
  double worst = -1;
  for (int k = 0; k < 10000; ++k)
    worst = std::max(worst, growth_fragmentation_delta(gf, 10 * uniform01(rng), 10 * uniform01(rng)).value);
  CHECK(worst <= 1e-10);
}

TEST_CASE("convexity of the mating kernel") {
  const MatingMix half(Law::dirac(0.5), 1.0);
  const Vec x{1.0, 0.0}, xs{3.0, 1.0}, y{0.0, 0.0}, ys{1.0, 0.5};
  CHECK(sexual_convexity_margin(half, x, xs, y, ys).value >= -1e-12);
  // Parallel, same orientation: equality.
  CHECK(sexual_convexity_margin(half, Vec{2.0}, Vec{5.0}, Vec{1.0}, Vec{3.0}).value ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sexual_convexity_margin(half, x, xs, x, xs).value == doctest::Approx(0.0));

  const MatingMix quad(Law::uniform(0, 1), 2.0);
  Stream rng = stream_for(5, 0);
  double worst = 1;
  const auto draw = [&] { return Vec{uniform01(rng) * 4 - 2, uniform01(rng) * 4 - 2, uniform01(rng) * 4 - 2}; };
  for (int k = 0; k < 10000; ++k)
    worst = std::min(worst, sexual_convexity_margin(quad, draw(), draw(), draw(), draw()).value);
  CHECK(worst >= -1e-10);
}

TEST_CASE("jump drift matches the model checkers") {
  const Renewal ren = renewal(power_rate(1, 1, 1), 1.0, Law::uniform(0, 1));
  Stream rng = stream_for(6, 0);
  for (int k = 0; k < 1000; ++k) {
    const Age x{10 * uniform01(rng)}, y{10 * uniform01(rng)};
    CHECK(jump_drift(ren, x, y).value <= 1e-10);
  }
}

TEST_CASE("truncation certificates") {
  CHECK(validate_truncation(renewal(power_rate(1, 1, 1), 1.0), kGrid).valid);
  CHECK_FALSE(validate_truncation(renewal(power_rate(0, 1, 1), 1.0), kGrid).valid);
  const GridSpec pair{0, 10, 81, 9};
  const PairRate d2 = power_rate2(1, 1, 1, 0.5, 1);
  const double a = suggest_a(d2, pair, pair, two_time_metric());
  CHECK(validate_truncation(TwoTime(d2, a), pair).valid);
}

TEST_CASE("randomized sweeps") {
  Stream rng = stream_for(7, 0);
  const SweepBox box;
  CHECK(sweep(renewal(power_rate(1, 1, 1), 1.0), 5000, box, rng).passed());
  CHECK(sweep(Sexual(3, MatingMix(Law::uniform(0, 1), 2.0)), 5000, box, rng).passed());
  const FragmentRatio beta(Law::uniform(0, 1));
  const GrowthFragmentation gf(GrowthFunction::constant(1), power_rate(1, 1, 1), beta,
                               suggest_a(power_rate(1, 1, 1), kGrid, 0.5));
  const SweepResult r = sweep(gf, 5000, box, rng);
  CHECK(r.evaluations == 5000);
  CHECK(r.passed());
}
