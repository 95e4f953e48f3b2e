#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "popot/admissibility.hpp"
#include "popot/cost.hpp"
#include "popot/functions.hpp"
#include "popot/law.hpp"
#include "popot/rng.hpp"
#include "popot/state.hpp"

namespace popot {

/// Which component(s) of a coupled pair jump at an event.
enum class EventClass { common, solo_first, solo_second };

std::string_view to_string(EventClass c);

/// Rates of the three event classes of a coupled pair.
struct EventRates {
  double common = 0;
  double solo_first = 0;
  double solo_second = 0;
  double total() const { return common + solo_first + solo_second; }
};

/// Maximal coupling of two jump clocks: (min, (d1 - d2)+, (d2 - d1)+).
EventRates split_rates(double first, double second);

// Every model below exposes the same surface used by the simulation engine:
//   flow(s, dt), rate(s), rate_bound(s, dt), jump(s, rng),
//   event_rates(x, y), aligned(x, y), coupled_jump(x, y, class, rng),
//   cost(x, y), expected_post_cost(x, y, class), in_space(s).
// rate_bound(s, dt) bounds the jump rate along the flow over [0, dt].
// expected_post_cost integrates the cost after a coupled jump over the
// jump randomness (exactly for atom and uniform laws).

/// Age-structured renewal process: dx/dt = g(x), jumps at rate d(x) to a
/// fresh age drawn from b.
class Renewal {
 public:
  using State = Age;
  static constexpr std::string_view kName = "renewal";

  Renewal(GrowthFunction g, ScalarRate d, BirthLaw b, double a);

  State flow(const State& s, double dt) const { return {g_.flow(s.x, dt)}; }
  double rate(const State& s) const { return d_(s.x); }
  double rate_bound(const State& s, double dt) const;
  State jump(const State&, Stream& rng) const { return {b_.sample(rng)}; }

  EventRates event_rates(const State& x, const State& y) const { return split_rates(rate(x), rate(y)); }
  bool aligned(const State&, const State&) const { return true; }
  /// Common events send both components to the same fresh age.
  std::pair<State, State> coupled_jump(const State& x, const State& y, EventClass c, Stream& rng) const;

  double cost(const State& x, const State& y) const { return cost_(x, y); }
  Expectation expected_post_cost(const State& x, const State& y, EventClass c) const;
  bool in_space(const State& s) const { return popot::in_space(s); }

  const GrowthFunction& growth() const { return g_; }
  const ScalarRate& jump_rate() const { return d_; }
  const BirthLaw& birth() const { return b_; }
  const CostFunction& cost_function() const { return cost_; }
  double truncation() const { return cost_.truncation(); }

 private:
  GrowthFunction g_;
  ScalarRate d_;
  BirthLaw b_;
  CostFunction cost_;
};

/// Growth and rate of one torus state of the renewal system.
struct CycleStage {
  GrowthFunction g;
  ScalarRate d;
};

/// Cell-cycle system: age x in torus state i flows with g_i and, at rate
/// d_i(x), restarts at age 0 in state i + 1 (mod I).
class RenewalSystem {
 public:
  using State = AgeState;
  static constexpr std::string_view kName = "renewal_system";

  RenewalSystem(std::vector<CycleStage> stages, double a);

  int torus_size() const { return static_cast<int>(stages_.size()); }
  int next_state(int i) const { return i % torus_size() + 1; }

  State flow(const State& s, double dt) const { return {stage(s.i).g.flow(s.x, dt), s.i}; }
  double rate(const State& s) const { return stage(s.i).d(s.x); }
  double rate_bound(const State& s, double dt) const;
  State jump(const State& s, Stream&) const { return {0.0, next_state(s.i)}; }

  /// Split rates when the torus states agree; independent full-rate solo
  /// jumps (common rate 0) otherwise.
  EventRates event_rates(const State& x, const State& y) const;
  bool aligned(const State& x, const State& y) const { return x.i == y.i; }
  std::pair<State, State> coupled_jump(const State& x, const State& y, EventClass c, Stream& rng) const;

  double cost(const State& x, const State& y) const { return cost_(x, y); }
  Expectation expected_post_cost(const State& x, const State& y, EventClass c) const;
  bool in_space(const State& s) const { return popot::in_space(s, torus_size()); }

  const CycleStage& stage(int i) const { return stages_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<CycleStage>& stages() const { return stages_; }
  const CostFunction& cost_function() const { return cost_; }
  double truncation() const { return cost_.truncation(); }

 private:
  std::vector<CycleStage> stages_;
  CostFunction cost_;
};

/// Space-age process on the PDE clock: age grows at speed eps^-2, jumps at
/// rate eps^-2 d(x) reset the age and move z to z - eps * eta, eta ~ k.
class SpaceAge {
 public:
  using State = AgePosition;
  static constexpr std::string_view kName = "space_age";

  SpaceAge(ScalarRate d, SpatialNoise k, double a);

  double eps() const { return noise_.scale(); }
  double time_scale() const { return noise_.scale(); }

  State flow(const State& s, double dt) const { return {s.x + dt * inv_eps2_, s.z}; }
  double rate(const State& s) const { return inv_eps2_ * d_(s.x); }
  double rate_bound(const State& s, double dt) const;
  State jump(const State& s, Stream& rng) const;

  EventRates event_rates(const State& x, const State& y) const;
  bool aligned(const State&, const State&) const { return true; }
  /// Common events displace both positions by one shared eta.
  std::pair<State, State> coupled_jump(const State& x, const State& y, EventClass c, Stream& rng) const;

  double cost(const State& x, const State& y) const { return cost_(x, y); }
  Expectation expected_post_cost(const State& x, const State& y, EventClass c) const;
  bool in_space(const State& s) const {
    return popot::in_space(s) && s.z.dim() == noise_.dim();
  }

  const ScalarRate& jump_rate() const { return d_; }
  const SpatialNoise& noise() const { return noise_; }
  const CostFunction& cost_function() const { return cost_; }
  double truncation() const { return cost_.truncation(); }

 private:
  ScalarRate d_;
  SpatialNoise noise_;
  double inv_eps2_;
  CostFunction cost_;
};

/// Two-time renewal: both ages grow at unit speed; at rate d(x1, x2) they
/// reset to (0, x1).
class TwoTime {
 public:
  using State = TimePair;
  static constexpr std::string_view kName = "two_time";

  TwoTime(PairRate d, double a);

  State flow(const State& s, double dt) const { return {s.x1 + dt, s.x2 + dt}; }
  double rate(const State& s) const { return d_({s.x1, s.x2}); }
  double rate_bound(const State& s, double dt) const;
  State jump(const State& s, Stream&) const { return {0.0, s.x1}; }

  EventRates event_rates(const State& x, const State& y) const { return split_rates(rate(x), rate(y)); }
  bool aligned(const State&, const State&) const { return true; }
  std::pair<State, State> coupled_jump(const State& x, const State& y, EventClass c, Stream& rng) const;

  double cost(const State& x, const State& y) const { return cost_(x, y); }
  Expectation expected_post_cost(const State& x, const State& y, EventClass c) const;
  bool in_space(const State& s) const { return popot::in_space(s); }

  const PairRate& jump_rate() const { return d_; }
  const CostFunction& cost_function() const { return cost_; }
  double truncation() const { return cost_.truncation(); }

 private:
  PairRate d_;
  CostFunction cost_;
};

/// Growth-fragmentation: dx/dt = g(x); at rate d(x) the size becomes r x with
/// r ~ beta.
class GrowthFragmentation {
 public:
  using State = Age;
  static constexpr std::string_view kName = "growth_fragmentation";

  GrowthFragmentation(GrowthFunction g, ScalarRate d, FragmentRatio beta, double a);

  State flow(const State& s, double dt) const { return {g_.flow(s.x, dt)}; }
  double rate(const State& s) const { return d_(s.x); }
  double rate_bound(const State& s, double dt) const;
  State jump(const State& s, Stream& rng) const { return {beta_.sample(rng) * s.x}; }

  EventRates event_rates(const State& x, const State& y) const { return split_rates(rate(x), rate(y)); }
  bool aligned(const State&, const State&) const { return true; }
  /// Common events scale both sizes by one shared ratio r.
  std::pair<State, State> coupled_jump(const State& x, const State& y, EventClass c, Stream& rng) const;

  double cost(const State& x, const State& y) const { return cost_(x, y); }
  Expectation expected_post_cost(const State& x, const State& y, EventClass c) const;
  bool in_space(const State& s) const { return popot::in_space(s); }

  const GrowthFunction& growth() const { return g_; }
  const ScalarRate& jump_rate() const { return d_; }
  const FragmentRatio& fragment() const { return beta_; }
  const CostFunction& cost_function() const { return cost_; }
  double truncation() const { return cost_.truncation(); }

 private:
  GrowthFunction g_;
  ScalarRate d_;
  FragmentRatio beta_;
  CostFunction cost_;
};

/// Age-size model: age grows at unit speed, size with dz/dt = g(z); at rate
/// d(x, z) the cell restarts at age 0 with size r z, r ~ beta.
class AgeSizeModel {
 public:
  using State = AgeSize;
  static constexpr std::string_view kName = "age_size";

  AgeSizeModel(GrowthFunction g, PairRate d, FragmentRatio beta, double a);

  State flow(const State& s, double dt) const { return {s.x + dt, g_.flow(s.z, dt)}; }
  double rate(const State& s) const { return d_({s.x, s.z}); }
  double rate_bound(const State& s, double dt) const;
  State jump(const State& s, Stream& rng) const { return {0.0, beta_.sample(rng) * s.z}; }

  EventRates event_rates(const State& x, const State& y) const { return split_rates(rate(x), rate(y)); }
  bool aligned(const State&, const State&) const { return true; }
  std::pair<State, State> coupled_jump(const State& x, const State& y, EventClass c, Stream& rng) const;

  double cost(const State& x, const State& y) const { return cost_(x, y); }
  Expectation expected_post_cost(const State& x, const State& y, EventClass c) const;
  bool in_space(const State& s) const { return popot::in_space(s); }

  const GrowthFunction& growth() const { return g_; }
  const PairRate& jump_rate() const { return d_; }
  const FragmentRatio& fragment() const { return beta_; }
  const CostFunction& cost_function() const { return cost_; }
  double truncation() const { return cost_.truncation(); }

 private:
  GrowthFunction g_;
  PairRate d_;
  FragmentRatio beta_;
  CostFunction cost_;
};

/// Homogeneous sexual-reproduction model on R^dim. Each individual is
/// replaced at rate 1 by sigma * x + (1 - sigma) * x_partner, sigma ~ h, with
/// the partner drawn from the current population.
class Sexual {
 public:
  using State = Trait;
  static constexpr std::string_view kName = "sexual";

  Sexual(std::size_t dim, MatingMix mix);

  std::size_t dim() const { return dim_; }
  const MatingMix& mix() const { return mix_; }

  State offspring(const State& self, const State& partner, double sigma) const {
    return {sigma * self.x + (1.0 - sigma) * partner.x};
  }
  double cost(const State& x, const State& y) const { return cost_(x, y); }
  bool in_space(const State& s) const { return popot::in_space(s) && s.x.dim() == dim_; }
  const CostFunction& cost_function() const { return cost_; }

 private:
  std::size_t dim_;
  MatingMix mix_;
  CostFunction cost_;
};

// Truncation-level certificates on a validation grid. Two-coordinate models
// use the same grid on both axes.

AdmissibilityReport validate_truncation(const Renewal& m, const GridSpec& grid);
AdmissibilityReport validate_truncation(const RenewalSystem& m, const GridSpec& grid);
AdmissibilityReport validate_truncation(const SpaceAge& m, const GridSpec& grid);
AdmissibilityReport validate_truncation(const TwoTime& m, const GridSpec& grid);
AdmissibilityReport validate_truncation(const GrowthFragmentation& m, const GridSpec& grid);
AdmissibilityReport validate_truncation(const AgeSizeModel& m, const GridSpec& grid);

/// Separation metric of the two-time condition: region 2|dx1| + |dx2|,
/// ratio numerator |dx1| + |dx2|, open wedge.
PairMetric two_time_metric();
/// Age-size metric: |dx| + |dz| for both region and numerator.
PairMetric age_size_metric();

/// Suggested truncation for a renewal system: the smallest per-stage
/// suggestion.
double suggest_a(const std::vector<CycleStage>& stages, const GridSpec& grid);

}  // namespace popot
