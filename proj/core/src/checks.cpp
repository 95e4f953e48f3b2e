#include "popot/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace popot {

namespace {

// Sum over classes of rate * (E[rho after] - rho) with the given base rates.
template <class Model>
Margin drift(const Model& m, const typename Model::State& x, const typename Model::State& y,
             double dx, double dy) {
  const EventRates r = split_rates(dx, dy);
  const double base = m.cost(x, y);
  Margin out;
  const auto add = [&](double rate, EventClass c) {
    if (rate <= 0) return;
    const Expectation e = m.expected_post_cost(x, y, c);
    out.value += rate * (e.value - base);
    out.quadrature = out.quadrature || e.quadrature;
  };
  add(r.common, EventClass::common);
  add(r.solo_first, EventClass::solo_first);
  add(r.solo_second, EventClass::solo_second);
  return out;
}

Margin negate(Margin m) {
  m.value = -m.value;
  return m;
}

struct Worst {
  SweepResult result;
  explicit Worst(std::string name) {
    result.name = std::move(name);
    result.worst_margin = std::numeric_limits<double>::infinity();
  }
  void add(const Margin& m, std::vector<double> where) {
    ++result.evaluations;
    result.quadrature = result.quadrature || m.quadrature;
    if (m.value < result.worst_margin) {
      result.worst_margin = m.value;
      result.witness = std::move(where);
    }
  }
};

double uniform(Stream& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Second scalar of a pair: far (uniform on [0, hi]) or near (within `near`).
double partner(Stream& rng, double x, double hi, double near) {
  if (uniform01(rng) < 0.5) return uniform(rng, 0, hi);
  return std::abs(x + uniform(rng, -near, near));
}

Vec random_vec(Stream& rng, std::size_t dim, double lo, double hi) {
  Vec v(dim);
  for (std::size_t k = 0; k < dim; ++k) v[k] = uniform(rng, lo, hi);
  return v;
}

void append(std::vector<double>& out, const Vec& v) {
  for (std::size_t k = 0; k < v.dim(); ++k) out.push_back(v[k]);
}

}  // namespace

Margin renewal_I_margin(const Renewal& m, double x, double y) {
  const Age ax{x}, ay{y};
  const double rho = m.cost(ax, ay);
  const double dx = m.rate(ax);
  const double dy = m.rate(ay);
  const double top = std::max(dx, dy);
  if (top == 0) return {rho, false};
  Margin out{rho, false};
  if (dx > dy) {
    const Expectation e = m.expected_post_cost(ax, ay, EventClass::solo_first);
    out.value -= (dx - dy) / top * e.value;
    out.quadrature = e.quadrature;
  } else if (dy > dx) {
    const Expectation e = m.expected_post_cost(ax, ay, EventClass::solo_second);
    out.value -= (dy - dx) / top * e.value;
    out.quadrature = e.quadrature;
  }
  return out;
}

Margin renewal_system_delta(const RenewalSystem& m, int i, double x, double y) {
  const auto& d = m.stage(i).d;
  const double dx = d(x);
  const double dy = d(y);
  const double a = m.truncation();
  return {std::max(dx, dy) * std::min(std::abs(x - y), a) - std::abs(dx - dy) * a, false};
}

Margin space_age_delta(const SpaceAge& m, const AgePosition& x, const AgePosition& y) {
  return drift(m, x, y, m.jump_rate()(x.x), m.jump_rate()(y.x));
}

Margin two_time_delta(const TwoTime& m, const TimePair& x, const TimePair& y) {
  return drift(m, x, y, m.rate(x), m.rate(y));
}

Margin growth_fragmentation_delta(const GrowthFragmentation& m, double x, double y) {
  return drift(m, Age{x}, Age{y}, m.rate(Age{x}), m.rate(Age{y}));
}

Margin age_size_margin(const AgeSizeModel& m, const AgeSize& x, const AgeSize& y) {
  const double dx = m.rate(x);
  const double dy = m.rate(y);
  const double a = m.truncation();
  const Expectation common =
      m.fragment().law().expect_min_abs_affine(a, std::abs(x.z - y.z), 0.0);
  const double lhs = std::max(dx, dy) * m.cost(x, y);
  const double rhs = std::min(dx, dy) * common.value + a * std::abs(dx - dy);
  return {lhs - rhs, common.quadrature};
}

Margin sexual_convexity_margin(const MatingMix& mix, const Vec& x1, const Vec& x1_partner,
                               const Vec& y1, const Vec& y1_partner) {
  const Vec u = x1 - y1;
  const Vec v = x1_partner - y1_partner;
  const double p = mix.p();
  const double theta = mix.theta();
  const auto pw = [p](double r) { return p == 1.0 ? r : std::pow(r, p); };
  const double rhs = theta * pw(norm(u)) + (1 - theta) * pw(norm(v));
  const Law& h = mix.law();
  Expectation lhs;
  if (p == 2.0) {
    const double s2 = h.second_moment();
    const double mean = h.mean();
    lhs.value = s2 * dot(u, u) + 2 * (mean - s2) * dot(u, v) + (1 - 2 * mean + s2) * dot(v, v);
  } else {
    lhs = h.expect([&](double s) { return pw(norm(s * u + (1 - s) * v)); });
  }
  return {rhs - lhs.value, lhs.quadrature};
}

SweepResult sweep(const Renewal& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("renewal_I");
  const double a = std::min(m.truncation(), box.hi);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = uniform(rng, 0, box.hi);
    const double y = partner(rng, x, box.hi, a);
    w.add(renewal_I_margin(m, x, y), {x, y});
  }
  return w.result;
}

SweepResult sweep(const RenewalSystem& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("renewal_system_delta");
  const double a = m.truncation();
  for (std::size_t k = 0; k < n; ++k) {
    const int i = 1 + static_cast<int>(uniform01(rng) * m.torus_size()) % m.torus_size();
    const double x = uniform(rng, 0, box.hi);
    const double y = partner(rng, x, box.hi, a);
    w.add(renewal_system_delta(m, i, x, y), {static_cast<double>(i), x, y});
  }
  return w.result;
}

SweepResult sweep(const SpaceAge& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("space_age_delta");
  const double a = m.truncation();
  const std::size_t dim = m.noise().dim();
  for (std::size_t k = 0; k < n; ++k) {
    const AgePosition x{uniform(rng, 0, box.hi), random_vec(rng, dim, -box.hi, box.hi)};
    AgePosition y;
    if (uniform01(rng) < 0.5) {
      y = {uniform(rng, 0, box.hi), random_vec(rng, dim, -box.hi, box.hi)};
    } else {
      y = {std::abs(x.x + uniform(rng, -a, a)), x.z + random_vec(rng, dim, -a, a)};
    }
    std::vector<double> where{x.x};
    append(where, x.z);
    where.push_back(y.x);
    append(where, y.z);
    w.add(negate(space_age_delta(m, x, y)), std::move(where));
  }
  return w.result;
}

SweepResult sweep(const TwoTime& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("two_time_delta");
  const double a = m.truncation();
  for (std::size_t k = 0; k < n; ++k) {
    const double x1 = uniform(rng, 0, box.hi);
    const TimePair x{x1, x1 + uniform(rng, 0, box.hi) + 1e-9};
    TimePair y;
    if (uniform01(rng) < 0.5) {
      const double y1 = uniform(rng, 0, box.hi);
      y = {y1, y1 + uniform(rng, 0, box.hi) + 1e-9};
    } else {
      const double y1 = std::abs(x.x1 + uniform(rng, -a / 2, a / 2));
      double y2 = x.x2 + uniform(rng, -a / 2, a / 2);
      if (!(y2 > y1)) y2 = y1 + uniform(rng, 0, a) + 1e-9;
      y = {y1, y2};
    }
    w.add(negate(two_time_delta(m, x, y)), {x.x1, x.x2, y.x1, y.x2});
  }
  return w.result;
}

SweepResult sweep(const GrowthFragmentation& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("growth_fragmentation_delta");
  const double a = m.truncation();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = uniform(rng, 0, box.hi);
    const double y = partner(rng, x, box.hi, a);
    w.add(negate(growth_fragmentation_delta(m, x, y)), {x, y});
  }
  return w.result;
}

SweepResult sweep(const AgeSizeModel& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("age_size_inequality");
  const double a = m.truncation();
  for (std::size_t k = 0; k < n; ++k) {
    const AgeSize x{uniform(rng, 0, box.hi), uniform(rng, 0, box.hi)};
    AgeSize y;
    if (uniform01(rng) < 0.5) {
      y = {uniform(rng, 0, box.hi), uniform(rng, 0, box.hi)};
    } else {
      y = {std::abs(x.x + uniform(rng, -a / 2, a / 2)), std::abs(x.z + uniform(rng, -a / 2, a / 2))};
    }
    w.add(age_size_margin(m, x, y), {x.x, x.z, y.x, y.z});
  }
  return w.result;
}

SweepResult sweep(const Sexual& m, std::size_t n, const SweepBox& box, Stream& rng) {
  Worst w("sexual_convexity");
  const std::size_t dim = m.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec x1 = random_vec(rng, dim, -box.hi, box.hi);
    const Vec x2 = random_vec(rng, dim, -box.hi, box.hi);
    const Vec y1 = random_vec(rng, dim, -box.hi, box.hi);
    const Vec y2 = random_vec(rng, dim, -box.hi, box.hi);
    std::vector<double> where;
    for (const Vec* v : {&x1, &x2, &y1, &y2}) append(where, *v);
    w.add(sexual_convexity_margin(m.mix(), x1, x2, y1, y2), std::move(where));
  }
  return w.result;
}

}  // namespace popot
