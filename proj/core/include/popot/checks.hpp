#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "popot/law.hpp"
#include "popot/models.hpp"
#include "popot/rng.hpp"

namespace popot {

/// Signed inequality margin; `quadrature` marks values that depend on a
/// Gauss-Legendre kernel integral.
struct Margin {
  double value = 0;
  bool quadrature = false;
};

/// rho(x, y) - I(x, y) for the renewal model, where I weighs the solo-jump
/// costs by the rate gaps over max(d(x), d(y)). I = 0 when both rates vanish.
Margin renewal_I_margin(const Renewal& m, double x, double y);

/// Delta_i(x, y) = max(d_i) min(|x - y|, a) - |d_i(x) - d_i(y)| a; expected >= 0.
Margin renewal_system_delta(const RenewalSystem& m, int i, double x, double y);

/// Drift of the truncated cost under one coupled jump; expected <= 0.
Margin space_age_delta(const SpaceAge& m, const AgePosition& x, const AgePosition& y);
Margin two_time_delta(const TwoTime& m, const TimePair& x, const TimePair& y);
Margin growth_fragmentation_delta(const GrowthFragmentation& m, double x, double y);

/// max(d) rho - [min(d) E min(a, r|z - z~|) + a |d - d~|]; expected >= 0.
Margin age_size_margin(const AgeSizeModel& m, const AgeSize& x, const AgeSize& y);

/// theta |x' - y'|^p + (1 - theta)|x'* - y'*|^p - E_h |sigma u + (1 - sigma) v|^p
/// with u = x' - y', v = x'* - y'*; expected >= 0.
Margin sexual_convexity_margin(const MatingMix& mix, const Vec& x1, const Vec& x1_partner,
                               const Vec& y1, const Vec& y1_partner);

/// Jump part of the generator applied to the cost:
/// sum over event classes of rate * (E[rho after the jump] - rho(x, y)).
template <class Model>
Margin jump_drift(const Model& m, const typename Model::State& x, const typename Model::State& y) {
  const EventRates r = m.event_rates(x, y);
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

/// Outcome of a randomized inequality sweep. Margins are oriented so that
/// every inequality reads margin >= 0.
struct SweepResult {
  std::string name;
  std::size_t evaluations = 0;
  double worst_margin = 0;
  std::vector<double> witness;
  bool quadrature = false;
  bool passed(double tolerance = 1e-10) const { return worst_margin >= -tolerance; }
};

/// Sampling box for sweeps: coordinates in [0, hi] (or [-hi, hi] for traits).
/// Half the draws are near pairs at separation below the truncation level.
struct SweepBox {
  double hi = 10.0;
};

SweepResult sweep(const Renewal& m, std::size_t n, const SweepBox& box, Stream& rng);
SweepResult sweep(const RenewalSystem& m, std::size_t n, const SweepBox& box, Stream& rng);
SweepResult sweep(const SpaceAge& m, std::size_t n, const SweepBox& box, Stream& rng);
SweepResult sweep(const TwoTime& m, std::size_t n, const SweepBox& box, Stream& rng);
SweepResult sweep(const GrowthFragmentation& m, std::size_t n, const SweepBox& box, Stream& rng);
SweepResult sweep(const AgeSizeModel& m, std::size_t n, const SweepBox& box, Stream& rng);
SweepResult sweep(const Sexual& m, std::size_t n, const SweepBox& box, Stream& rng);

}  // namespace popot
