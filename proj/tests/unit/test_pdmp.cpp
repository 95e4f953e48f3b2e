#include <doctest.h>

#include <cmath>

#include "popot/pdmp.hpp"
#include "popot/stats.hpp"

using namespace popot;

namespace {

Renewal renewal(ScalarRate d, Law b = Law::dirac(0.0), double a = 1.0) {
  return Renewal(GrowthFunction::constant(1.0), std::move(d), BirthLaw(std::move(b)), a);
}

std::vector<double> first_event_times(const Renewal& m, std::size_t n, std::uint64_t seed) {
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    Stream rng = stream_for(seed, k);
    Age s{0.0};
    double t = 0;
    for (;;) {
      if (auto ev = thinning_next_event(m, s, t, 0.1, rng)) {
        out.push_back(*ev);
        break;
      }
      t += 0.1;
    }
  }
  return out;
}

SimConfig config(std::size_t n, double horizon, std::size_t checkpoints, std::uint64_t seed) {
  SimConfig cfg;
  cfg.n_particles = n;
  cfg.horizon = horizon;
  cfg.checkpoints = uniform_checkpoints(horizon, checkpoints);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("statistics helpers") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(standard_error(v) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(standard_error(std::vector<double>{1.0}) == 0.0);
  CHECK(kolmogorov_tail(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_tail(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_tail(1.95) == doctest::Approx(0.001).epsilon(0.05));

  Stream rng = stream_for(1, 0);
  std::vector<double> a, b, c;
  for (int k = 0; k < 20000; ++k) {
    a.push_back(uniform01(rng));
    b.push_back(uniform01(rng));
    c.push_back(uniform01(rng) * 1.1);
  }
  CHECK(ks_two_sample(a, b).p_value > 0.001);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK(ks_one_sample(a, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value > 0.001);
  CHECK(ks_two_sample({0, 0, 1, 1}, {0, 0, 1, 1}).statistic == 0.0);

  std::vector<std::vector<double>> pa, pb;
  for (int k = 0; k < 5000; ++k) {
    pa.push_back({uniform01(rng), uniform01(rng)});
    pb.push_back({uniform01(rng), uniform01(rng)});
  }
  CHECK(ks_projections(pa, pb) > 0.001);
}

TEST_CASE("clustered KS calibration") {
  // Each cluster shares a random offset, which the plain test ignores.
  Stream rng = stream_for(2, 0);
  const auto clustered = [&](double shift) {
    std::vector<std::vector<double>> out;
    for (int c = 0; c < 20; ++c) {
      const double offset = 0.3 * (uniform01(rng) - 0.5) + shift;
      for (int k = 0; k < 500; ++k) out.push_back({uniform01(rng) + offset, uniform01(rng)});
    }
    return out;
  };
  const auto a = clustered(0.0), b = clustered(0.0), c = clustered(0.5);
  CHECK(ks_projections_clustered(a, 20, b, 20, 999, 1) > 0.001);
  CHECK(ks_projections_clustered(a, 20, c, 20, 999, 2) == doctest::Approx(0.001));
  CHECK(ks_projections_clustered(a, 20, b, 20, 999, 3) == ks_projections_clustered(a, 20, b, 20, 999, 3));
  CHECK_THROWS_AS(ks_projections_clustered(a, 0, b, 20, 99, 1), std::invalid_argument);
}

TEST_CASE("checkpoints and configuration") {
  const auto cps = uniform_checkpoints(3.0, 10);
  REQUIRE(cps.size() == 11);
  CHECK(cps.front() == 0.0);
  CHECK(cps.back() == 3.0);
  SimConfig bad;
  bad.checkpoints = {0.5, 0.2};
  CHECK_THROWS(bad.validate());
  bad.checkpoints = {2.0};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("thinning reproduces event-time laws") {
  const auto exp_times = first_event_times(renewal(constant_rate(2.0)), 100000, 11);
  CHECK(ks_one_sample(exp_times, [](double t) { return 1 - std::exp(-2 * t); }).p_value > 0.001);

  const auto lin_times = first_event_times(renewal(power_rate(1, 1, 1)), 100000, 12);
  CHECK(ks_one_sample(lin_times, [](double t) { return 1 - std::exp(-t - t * t / 2); }).p_value > 0.001);

  const Renewal silent = renewal(constant_rate(0.0));
  Stream rng = stream_for(13, 0);
  Age s{0.0};
  for (int k = 0; k < 100; ++k) CHECK_FALSE(thinning_next_event(silent, s, 0.1 * k, 0.1, rng));
  CHECK(s.x == doctest::Approx(10.0));
}

TEST_CASE("an understated envelope is an error") {
  const ScalarRate liar([](double x) { return 1 + x; }, [](double, double) { return 1.0; });
  const Renewal m = renewal(liar);
  Stream rng = stream_for(14, 0);
  Age s{5.0};
  CHECK_THROWS_AS(
      [&] {
        for (int k = 0; k < 1000; ++k) thinning_next_event(m, s, 0.0, 1.0, rng);
      }(),
      EnvelopeViolation);
}

TEST_CASE("backward recurrence time") {
  const auto run = simulate_population(renewal(constant_rate(1.0)), config(100000, 5.0, 1, 21),
                                       EmpiricalMeasure<Age>::uniform({{0.0}}));
  std::size_t tail = 0;
  for (const Age& a : run.back().atoms()) tail += a.x > 1.0;
  const double p = std::exp(-1.0);
  CHECK(std::abs(tail / 1e5 - p) <= 3 * std::sqrt(p * (1 - p) / 1e5));
}

TEST_CASE("zero rate is a pure flow") {
  const GrowthFragmentation gf(GrowthFunction::affine(1.0, -0.2), constant_rate(0.0),
                               FragmentRatio(Law::uniform(0, 1)), 1.0);
  const auto init = EmpiricalMeasure<Age>::uniform({{0.0}, {1.0}, {4.0}});
  const auto run = simulate_population(gf, config(300, 2.0, 4, 22), init);
  const auto& cps = uniform_checkpoints(2.0, 4);
  for (std::size_t c = 0; c < cps.size(); ++c) {
    Stream rng = stream_for(22, 0, kInitialStream);
    const auto start = init.sample(300, rng);
    for (std::size_t k = 0; k < 300; ++k)
      CHECK(run[c].atom(k).x == doctest::Approx(gf.growth().flow(start[k].x, cps[c])).epsilon(1e-12));
  }
}

TEST_CASE("identical pairs stay merged") {
  Stream rng = stream_for(23, 0);
  std::vector<std::pair<Age, Age>> pairs;
  for (int k = 0; k < 2000; ++k) {
    const Age a{3 * uniform01(rng)};
    pairs.emplace_back(a, a);
  }
  const auto check = [](const auto& run) {
    for (const auto& st : run.stats) CHECK(st.mean_cost == 0.0);
    for (const auto& p : run.clouds.back()) CHECK(p.first == p.second);
  };
  check(simulate_coupled(renewal(power_rate(1, 1, 1), Law::uniform(0, 1)), config(2000, 2, 4, 24), pairs));
  check(simulate_coupled(GrowthFragmentation(GrowthFunction::constant(1), power_rate(1, 1, 1),
                                             FragmentRatio(Law::uniform(0, 1)), 0.45),
                         config(2000, 2, 4, 25), pairs));

  std::vector<std::pair<AgePosition, AgePosition>> sp;
  for (int k = 0; k < 2000; ++k) {
    const AgePosition a{uniform01(rng), Vec{uniform01(rng)}};
    sp.emplace_back(a, a);
  }
  check(simulate_coupled(SpaceAge(power_rate(1, 1, 1), SpatialNoise(VectorLaw::product({Law::uniform(-1, 1)}), 0.5), 1.0),
                         config(2000, 1, 4, 26), sp));

  std::vector<std::pair<AgeSize, AgeSize>> as;
  for (int k = 0; k < 2000; ++k) {
    const AgeSize a{uniform01(rng), 1 + uniform01(rng)};
    as.emplace_back(a, a);
  }
  check(simulate_coupled(AgeSizeModel(GrowthFunction::constant(1), power_rate2(1, 1, 1, 1, 1),
                                      FragmentRatio(Law::uniform(0, 1)), 0.4),
                         config(2000, 2, 4, 27), as));
}

TEST_CASE("merge time of a constant-rate renewal pair") {
  std::vector<std::pair<Age, Age>> pairs(100000, {Age{0.0}, Age{3.0}});
  const auto run = simulate_coupled(renewal(constant_rate(1.0)), config(100000, 2.0, 4, 31), pairs);
  for (const auto& st : run.stats) {
    CHECK(std::abs(st.mean_cost - std::exp(-st.time)) <= 3 * st.stderr_cost + 1e-15);
    CHECK(st.solo_events == 0);
  }
  CHECK(run.stats.back().touched == doctest::Approx(1 - std::exp(-2.0)).epsilon(0.02));
}

TEST_CASE("coupled marginals match independent simulation") {
  const GrowthFragmentation gf(GrowthFunction::constant(1), power_rate(1, 1, 1),
                               FragmentRatio(Law::uniform(0, 1)), 0.45);
  Stream rng = stream_for(32, 0);
  std::vector<std::pair<Age, Age>> pairs;
  std::vector<Age> firsts;
  for (int k = 0; k < 20000; ++k) {
    pairs.emplace_back(Age{1.0}, Age{2 * uniform01(rng)});
    firsts.push_back({1.0});
  }
  const auto coupled = simulate_coupled(gf, config(20000, 2.0, 1, 33), pairs);
  const auto solo = simulate_population(gf, config(20000, 2.0, 1, 34), EmpiricalMeasure<Age>::uniform({{1.0}}));
  std::vector<double> a, b;
  for (const auto& p : coupled.clouds.back()) a.push_back(p.first.x);
  for (const Age& s : solo.back().atoms()) b.push_back(s.x);
  CHECK(ks_two_sample(a, b).p_value > 0.001);
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  const Renewal m = renewal(power_rate(1, 1, 1), Law::uniform(0, 1));
  std::vector<std::pair<Age, Age>> pairs;
  for (int k = 0; k < 3000; ++k) pairs.emplace_back(Age{0.1 * (k % 10)}, Age{2.0});
  SimConfig cfg = config(3000, 2.0, 4, 41);
  const auto one = simulate_coupled(m, cfg, pairs);
  cfg.workers = 3;
  const auto three = simulate_coupled(m, cfg, pairs);
  for (std::size_t c = 0; c < one.stats.size(); ++c) {
    CHECK(one.stats[c].mean_cost == three.stats[c].mean_cost);
    CHECK(one.stats[c].stderr_cost == three.stats[c].stderr_cost);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) CHECK(one.clouds.back()[k].first == three.clouds.back()[k].first);
}

TEST_CASE("sexual model") {
  const Sexual half(2, MatingMix(Law::dirac(0.5), 1.0));
  Stream rng = stream_for(51, 0);
  std::vector<Trait> init;
  for (int k = 0; k < 20000; ++k) {
    const double u = 2 * uniform01(rng) - 1, v = 2 * uniform01(rng) - 1;
    init.push_back({Vec{3 + u, -1 + v}});
    init.push_back({Vec{3 - u, -1 - v}});
  }
  SimConfig cfg = config(init.size(), 2.0, 2, 52);
  const auto run = simulate_population(half, cfg, init);
  double sx = 0, sy = 0;
  for (const Trait& t : run.back().atoms()) {
    sx += t.x[0];
    sy += t.x[1];
  }
  const double n = static_cast<double>(init.size());
  CHECK(sx / n == doctest::Approx(3.0).epsilon(0.003));
  CHECK(sy / n == doctest::Approx(-1.0).epsilon(0.01));

  // Parallel displacements of equal orientation: cost is preserved exactly.
  std::vector<std::pair<Trait, Trait>> pairs;
  for (int k = 0; k < 500; ++k) {
    const Vec x{uniform01(rng), uniform01(rng)};
    pairs.emplace_back(Trait{x}, Trait{x + Vec{0.3, 0.4}});
  }
  const auto coupled = simulate_coupled(half, config(500, 2.0, 4, 53), pairs);
  for (const auto& st : coupled.stats) CHECK(st.mean_cost == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coupled.stats.back().common_events > 0);

  const Sexual uni(2, MatingMix(Law::uniform(0, 1), 1.0));
  std::vector<std::pair<Trait, Trait>> spread;
  for (int k = 0; k < 2000; ++k)
    spread.emplace_back(Trait{Vec{uniform01(rng), uniform01(rng)}}, Trait{Vec{2 * uniform01(rng), 2 * uniform01(rng)}});
  const auto c2 = simulate_coupled(uni, config(2000, 3.0, 6, 54), spread);
  for (std::size_t c = 1; c < c2.stats.size(); ++c)
    CHECK(c2.stats[c].mean_cost <=
          c2.stats[c - 1].mean_cost + 3 * std::hypot(c2.stats[c].stderr_cost, c2.stats[c - 1].stderr_cost));

  std::vector<CoupledRun<Trait>> reps{c2, c2};
  const auto both = combine_replicas(reps);
  CHECK(both.stats.back().n_pairs == 4000);
  CHECK(both.stats.back().mean_cost == doctest::Approx(c2.stats.back().mean_cost));
  CHECK(both.clouds.back().size() == 4000);
}

TEST_CASE("simulated paths cover the horizon") {
  const Renewal m = renewal(power_rate(1, 1, 1));
  Stream rng = stream_for(61, 0);
  const auto path = simulate_path(m, Age{0.5}, 3.0, 0.1, rng);
  REQUIRE_FALSE(path.empty());
  CHECK(path.front().start == 0.0);
  CHECK(path.back().end == 3.0);
  for (std::size_t k = 1; k < path.size(); ++k) CHECK(path[k].start == path[k - 1].end);
}
