#pragma once

#include <limits>
#include <string_view>

#include "popot/state.hpp"

namespace popot {

enum class CostKind {
  trunc_abs,        ///< min(a, |x - y|)
  trunc_abs_state,  ///< min(a, |x - y|) when i == j, a otherwise
  trunc_sum,        ///< min(a, |x - y| + |z - r|)
  trunc_weighted,   ///< min(a, 2|x1 - y1| + |x2 - y2|)
  power,            ///< |x - y|^p
};

std::string_view to_string(CostKind kind);
CostKind cost_kind_from_string(std::string_view name);

/// Transport cost rho on one state space. Symmetric, zero on the diagonal,
/// bounded by the truncation level for every truncated kind. A truncation of
/// +inf leaves the underlying distance untruncated.
///
/// trunc_abs_state and trunc_weighted are metrics, as is trunc_abs and
/// trunc_sum; power with p > 1 is not (the triangle inequality fails).
class CostFunction {
 public:
  static CostFunction trunc_abs(double a);
  static CostFunction trunc_abs_state(double a);
  static CostFunction trunc_sum(double a);
  static CostFunction trunc_weighted(double a);
  static CostFunction power(double p);

  CostKind kind() const { return kind_; }
  double truncation() const { return a_; }
  double exponent() const { return p_; }
  bool is_metric() const { return kind_ != CostKind::power || p_ <= 1.0; }
  bool supports(Space space) const;

  double operator()(const Age& x, const Age& y) const;
  double operator()(const AgeState& x, const AgeState& y) const;
  double operator()(const AgePosition& x, const AgePosition& y) const;
  double operator()(const TimePair& x, const TimePair& y) const;
  double operator()(const AgeSize& x, const AgeSize& y) const;
  double operator()(const Trait& x, const Trait& y) const;
  /// Throws std::invalid_argument on mismatched variants.
  double operator()(const StatePoint& x, const StatePoint& y) const;

 private:
  CostFunction(CostKind kind, double a, double p) : kind_(kind), a_(a), p_(p) {}
  [[noreturn]] void unsupported(Space space) const;

  CostKind kind_;
  double a_;
  double p_;
};

}  // namespace popot
