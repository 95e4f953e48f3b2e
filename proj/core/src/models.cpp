#include "popot/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace popot {

namespace {

void require_growth(const GrowthFunction& g) {
  if (!g.is_nonincreasing()) throw std::invalid_argument("growth must be flagged non-increasing");
  g.validate(0.0, 10.0, 1001);
}

std::pair<double, double> positive_parts(double d1, double d2) {
  return {std::max(d1 - d2, 0.0), std::max(d2 - d1, 0.0)};
}

AdmissibilityReport merge(AdmissibilityReport acc, const AdmissibilityReport& r) {
  acc.pairs_checked += r.pairs_checked;
  if (r.min_ratio < acc.min_ratio) acc.min_ratio = r.min_ratio;
  if (!r.valid && acc.valid) {
    acc.valid = false;
    acc.witness = r.witness;
  }
  return acc;
}

}  // namespace

std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::common: return "common";
    case EventClass::solo_first: return "solo_first";
    case EventClass::solo_second: return "solo_second";
  }
  return "unknown";
}

EventRates split_rates(double first, double second) {
  const auto [p, q] = positive_parts(first, second);
  return {std::min(first, second), p, q};
}

// Renewal

Renewal::Renewal(GrowthFunction g, ScalarRate d, BirthLaw b, double a)
    : g_(std::move(g)), d_(std::move(d)), b_(std::move(b)), cost_(CostFunction::trunc_abs(a)) {
  require_growth(g_);
}

double Renewal::rate_bound(const State& s, double dt) const {
  return d_.interval_bound(s.x, g_.flow(s.x, dt));
}

std::pair<Age, Age> Renewal::coupled_jump(const State& x, const State& y, EventClass c,
                                          Stream& rng) const {
  switch (c) {
    case EventClass::common: {
      const Age z{b_.sample(rng)};
      return {z, z};
    }
    case EventClass::solo_first: return {jump(x, rng), y};
    case EventClass::solo_second: return {x, jump(y, rng)};
  }
  return {x, y};
}

Expectation Renewal::expected_post_cost(const State& x, const State& y, EventClass c) const {
  const double a = truncation();
  switch (c) {
    case EventClass::common: return {0.0, false};
    case EventClass::solo_first: return b_.law().expect_min_abs_affine(a, 1.0, -y.x);
    case EventClass::solo_second: return b_.law().expect_min_abs_affine(a, 1.0, -x.x);
  }
  return {};
}

// RenewalSystem

RenewalSystem::RenewalSystem(std::vector<CycleStage> stages, double a)
    : stages_(std::move(stages)), cost_(CostFunction::trunc_abs_state(a)) {
  if (stages_.empty()) throw std::invalid_argument("renewal system needs at least one state");
  for (const auto& s : stages_) require_growth(s.g);
}

double RenewalSystem::rate_bound(const State& s, double dt) const {
  const CycleStage& st = stage(s.i);
  return st.d.interval_bound(s.x, st.g.flow(s.x, dt));
}

EventRates RenewalSystem::event_rates(const State& x, const State& y) const {
  if (aligned(x, y)) return split_rates(rate(x), rate(y));
  return {0.0, rate(x), rate(y)};
}

std::pair<AgeState, AgeState> RenewalSystem::coupled_jump(const State& x, const State& y,
                                                          EventClass c, Stream& rng) const {
  switch (c) {
    case EventClass::common: return {jump(x, rng), jump(y, rng)};
    case EventClass::solo_first: return {jump(x, rng), y};
    case EventClass::solo_second: return {x, jump(y, rng)};
  }
  return {x, y};
}

Expectation RenewalSystem::expected_post_cost(const State& x, const State& y, EventClass c) const {
  const State jx{0.0, next_state(x.i)};
  const State jy{0.0, next_state(y.i)};
  switch (c) {
    case EventClass::common: return {cost(jx, jy), false};
    case EventClass::solo_first: return {cost(jx, y), false};
    case EventClass::solo_second: return {cost(x, jy), false};
  }
  return {};
}

// SpaceAge

SpaceAge::SpaceAge(ScalarRate d, SpatialNoise k, double a)
    : d_(std::move(d)), noise_(std::move(k)), inv_eps2_(1.0 / (noise_.scale() * noise_.scale())),
      cost_(CostFunction::trunc_sum(a)) {}

double SpaceAge::rate_bound(const State& s, double dt) const {
  return inv_eps2_ * d_.interval_bound(s.x, s.x + dt * inv_eps2_);
}

AgePosition SpaceAge::jump(const State& s, Stream& rng) const {
  return {0.0, s.z - eps() * noise_.sample(rng)};
}

EventRates SpaceAge::event_rates(const State& x, const State& y) const {
  return split_rates(rate(x), rate(y));
}

std::pair<AgePosition, AgePosition> SpaceAge::coupled_jump(const State& x, const State& y,
                                                           EventClass c, Stream& rng) const {
  switch (c) {
    case EventClass::common: {
      const Vec eta = noise_.sample(rng);
      return {State{0.0, x.z - eps() * eta}, State{0.0, y.z - eps() * eta}};
    }
    case EventClass::solo_first: return {jump(x, rng), y};
    case EventClass::solo_second: return {x, jump(y, rng)};
  }
  return {x, y};
}

Expectation SpaceAge::expected_post_cost(const State& x, const State& y, EventClass c) const {
  const double a = truncation();
  const double e = eps();
  switch (c) {
    case EventClass::common: return {std::min(a, norm(x.z - y.z)), false};
    case EventClass::solo_first:
      return noise_.law().expect(
          [&](const Vec& eta) { return std::min(a, y.x + norm(x.z - e * eta - y.z)); });
    case EventClass::solo_second:
      return noise_.law().expect(
          [&](const Vec& eta) { return std::min(a, x.x + norm(x.z - (y.z - e * eta))); });
  }
  return {};
}

// TwoTime

TwoTime::TwoTime(PairRate d, double a) : d_(std::move(d)), cost_(CostFunction::trunc_weighted(a)) {}

double TwoTime::rate_bound(const State& s, double dt) const {
  return d_.interval_bound({s.x1, s.x2}, {s.x1 + dt, s.x2 + dt});
}

std::pair<TimePair, TimePair> TwoTime::coupled_jump(const State& x, const State& y, EventClass c,
                                                    Stream& rng) const {
  switch (c) {
    case EventClass::common: return {jump(x, rng), jump(y, rng)};
    case EventClass::solo_first: return {jump(x, rng), y};
    case EventClass::solo_second: return {x, jump(y, rng)};
  }
  return {x, y};
}

Expectation TwoTime::expected_post_cost(const State& x, const State& y, EventClass c) const {
  const double a = truncation();
  switch (c) {
    case EventClass::common: return {std::min(a, std::abs(x.x1 - y.x1)), false};
    case EventClass::solo_first: return {std::min(a, 2 * y.x1 + std::abs(x.x1 - y.x2)), false};
    case EventClass::solo_second: return {std::min(a, 2 * x.x1 + std::abs(y.x1 - x.x2)), false};
  }
  return {};
}

// GrowthFragmentation

GrowthFragmentation::GrowthFragmentation(GrowthFunction g, ScalarRate d, FragmentRatio beta,
                                         double a)
    : g_(std::move(g)), d_(std::move(d)), beta_(std::move(beta)),
      cost_(CostFunction::trunc_abs(a)) {
  require_growth(g_);
}

double GrowthFragmentation::rate_bound(const State& s, double dt) const {
  return d_.interval_bound(s.x, g_.flow(s.x, dt));
}

std::pair<Age, Age> GrowthFragmentation::coupled_jump(const State& x, const State& y, EventClass c,
                                                      Stream& rng) const {
  switch (c) {
    case EventClass::common: {
      const double r = beta_.sample(rng);
      return {Age{r * x.x}, Age{r * y.x}};
    }
    case EventClass::solo_first: return {jump(x, rng), y};
    case EventClass::solo_second: return {x, jump(y, rng)};
  }
  return {x, y};
}

Expectation GrowthFragmentation::expected_post_cost(const State& x, const State& y,
                                                    EventClass c) const {
  const double a = truncation();
  const Law& b = beta_.law();
  switch (c) {
    case EventClass::common: return b.expect_min_abs_affine(a, std::abs(x.x - y.x), 0.0);
    case EventClass::solo_first: return b.expect_min_abs_affine(a, x.x, -y.x);
    case EventClass::solo_second: return b.expect_min_abs_affine(a, y.x, -x.x);
  }
  return {};
}

// AgeSizeModel

AgeSizeModel::AgeSizeModel(GrowthFunction g, PairRate d, FragmentRatio beta, double a)
    : g_(std::move(g)), d_(std::move(d)), beta_(std::move(beta)), cost_(CostFunction::trunc_sum(a)) {
  require_growth(g_);
}

double AgeSizeModel::rate_bound(const State& s, double dt) const {
  return d_.interval_bound({s.x, s.z}, {s.x + dt, g_.flow(s.z, dt)});
}

std::pair<AgeSize, AgeSize> AgeSizeModel::coupled_jump(const State& x, const State& y, EventClass c,
                                                       Stream& rng) const {
  switch (c) {
    case EventClass::common: {
      const double r = beta_.sample(rng);
      return {AgeSize{0.0, r * x.z}, AgeSize{0.0, r * y.z}};
    }
    case EventClass::solo_first: return {jump(x, rng), y};
    case EventClass::solo_second: return {x, jump(y, rng)};
  }
  return {x, y};
}

Expectation AgeSizeModel::expected_post_cost(const State& x, const State& y, EventClass c) const {
  const double a = truncation();
  const Law& b = beta_.law();
  // min(a, h + |v|) = h + min(a - h, |v|) for 0 <= h <= a.
  const auto shifted = [&](double h, double slope, double offset) -> Expectation {
    if (h >= a) return {a, false};
    Expectation e = b.expect_min_abs_affine(a - h, slope, offset);
    e.value += h;
    return e;
  };
  switch (c) {
    case EventClass::common: return b.expect_min_abs_affine(a, std::abs(x.z - y.z), 0.0);
    case EventClass::solo_first: return shifted(y.x, x.z, -y.z);
    case EventClass::solo_second: return shifted(x.x, y.z, -x.z);
  }
  return {};
}

// Sexual

Sexual::Sexual(std::size_t dim, MatingMix mix)
    : dim_(dim), mix_(std::move(mix)), cost_(CostFunction::power(mix_.p())) {
  if (dim == 0 || dim > Vec::kCapacity) throw std::invalid_argument("trait dimension must be 1..3");
}

// Truncation certificates

PairMetric two_time_metric() {
  PairMetric m;
  m.region_w[0] = 2.0;
  m.region_w[1] = 1.0;
  m.wedge = true;
  return m;
}

PairMetric age_size_metric() { return PairMetric{}; }

AdmissibilityReport validate_truncation(const Renewal& m, const GridSpec& grid) {
  return admissible_a(m.jump_rate(), m.truncation(), grid);
}

AdmissibilityReport validate_truncation(const RenewalSystem& m, const GridSpec& grid) {
  AdmissibilityReport acc;
  acc.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& s : m.stages()) acc = merge(acc, admissible_a(s.d, m.truncation(), grid));
  return acc;
}

AdmissibilityReport validate_truncation(const SpaceAge& m, const GridSpec& grid) {
  return admissible_a(m.jump_rate(), m.truncation(), grid);
}

AdmissibilityReport validate_truncation(const TwoTime& m, const GridSpec& grid) {
  return admissible_a(m.jump_rate(), m.truncation(), grid, grid, two_time_metric());
}

AdmissibilityReport validate_truncation(const GrowthFragmentation& m, const GridSpec& grid) {
  return admissible_a(m.jump_rate(), m.truncation(), grid, 1.0 - m.fragment().mean_ratio());
}

AdmissibilityReport validate_truncation(const AgeSizeModel& m, const GridSpec& grid) {
  return admissible_a(m.jump_rate(), m.truncation(), grid, grid, age_size_metric(),
                      1.0 - m.fragment().mean_ratio());
}

double suggest_a(const std::vector<CycleStage>& stages, const GridSpec& grid) {
  if (stages.empty()) throw std::invalid_argument("renewal system needs at least one state");
  double a = std::numeric_limits<double>::infinity();
  for (const auto& s : stages) a = std::min(a, suggest_a(s.d, grid));
  return a;
}

}  // namespace popot
