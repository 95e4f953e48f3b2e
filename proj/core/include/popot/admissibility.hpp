#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "popot/functions.hpp"

namespace popot {

/// Uniform validation grid on [lo, hi]. After the coarse scan, the pair with
/// the smallest ratio is re-examined on a local grid of `refine` points per
/// coordinate spanning two coarse cells on each side.
struct GridSpec {
  double lo = 0.0;
  double hi = 10.0;
  std::size_t points = 2001;
  std::size_t refine = 64;
};

/// Pair of grid points where the truncation condition fails:
/// lhs = candidate a, rhs = factor * separation * max(rates) / |rate gap|.
struct Witness {
  std::vector<double> first;
  std::vector<double> second;
  double lhs = 0;
  double rhs = 0;
};

struct AdmissibilityReport {
  bool valid = true;
  /// Smallest factor * ratio seen over pairs inside the separation ball
  /// (+inf when every rate gap vanished).
  double min_ratio = 0;
  std::size_t pairs_checked = 0;
  std::optional<Witness> witness;
};

/// Two-coordinate separation: pairs are considered when
/// region_w[0]|dx0| + region_w[1]|dx1| <= a; the ratio numerator is
/// ratio_w[0]|dx0| + ratio_w[1]|dx1|. `wedge` restricts to x1 > x0.
struct PairMetric {
  double region_w[2] = {1.0, 1.0};
  double ratio_w[2] = {1.0, 1.0};
  bool wedge = false;
};

/// Relative round-off allowance when comparing a against the ratio.
inline constexpr double kAdmissibilityRoundoff = 1e-12;

/// Checks a <= factor * inf_{|x-y| <= a} |x-y| max(d(x), d(y)) / |d(x) - d(y)|
/// on the grid. Pairs with equal rates are skipped.
AdmissibilityReport admissible_a(const ScalarRate& rate, double candidate_a, const GridSpec& grid,
                                 double factor = 1.0);

AdmissibilityReport admissible_a(const PairRate& rate, double candidate_a, const GridSpec& grid0,
                                 const GridSpec& grid1, const PairMetric& metric,
                                 double factor = 1.0);

/// Safety factor applied by suggest_a.
inline constexpr double kSuggestSafety = 0.9;

/// 0.9 * min(a0, 1) where a0 is the grid infimum of the ratio over
/// separations <= 1. Throws std::domain_error when a0 == 0.
double suggest_a(const ScalarRate& rate, const GridSpec& grid, double factor = 1.0);
double suggest_a(const PairRate& rate, const GridSpec& grid0, const GridSpec& grid1,
                 const PairMetric& metric, double factor = 1.0);

}  // namespace popot
