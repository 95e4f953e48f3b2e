#include "popot/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace popot {

namespace {

double check_a(double a) {
  if (!(a > 0)) throw std::invalid_argument("truncation a must be > 0");
  return a;
}

}  // namespace

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::trunc_abs: return "trunc_abs";
    case CostKind::trunc_abs_state: return "trunc_abs_state";
    case CostKind::trunc_sum: return "trunc_sum";
    case CostKind::trunc_weighted: return "trunc_weighted";
    case CostKind::power: return "power";
  }
  return "unknown";
}

CostKind cost_kind_from_string(std::string_view name) {
  for (CostKind k : {CostKind::trunc_abs, CostKind::trunc_abs_state, CostKind::trunc_sum,
                     CostKind::trunc_weighted, CostKind::power})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown cost: " + std::string(name));
}

CostFunction CostFunction::trunc_abs(double a) { return {CostKind::trunc_abs, check_a(a), 1.0}; }

CostFunction CostFunction::trunc_abs_state(double a) {
  if (!std::isfinite(check_a(a))) throw std::invalid_argument("trunc_abs_state needs a finite a");
  return {CostKind::trunc_abs_state, a, 1.0};
}

CostFunction CostFunction::trunc_sum(double a) { return {CostKind::trunc_sum, check_a(a), 1.0}; }

CostFunction CostFunction::trunc_weighted(double a) {
  return {CostKind::trunc_weighted, check_a(a), 1.0};
}

CostFunction CostFunction::power(double p) {
  if (!(p > 0) || !std::isfinite(p)) throw std::invalid_argument("cost exponent must be > 0");
  return {CostKind::power, std::numeric_limits<double>::infinity(), p};
}

bool CostFunction::supports(Space space) const {
  switch (space) {
    case Space::age:
    case Space::trait: return kind_ == CostKind::trunc_abs || kind_ == CostKind::power;
    case Space::age_state: return kind_ == CostKind::trunc_abs_state;
    case Space::age_position:
    case Space::age_size: return kind_ == CostKind::trunc_sum;
    case Space::time_pair: return kind_ == CostKind::trunc_weighted;
  }
  return false;
}

void CostFunction::unsupported(Space space) const {
  throw std::invalid_argument("cost " + std::string(to_string(kind_)) + " is not defined on " +
                              std::string(to_string(space)));
}

double CostFunction::operator()(const Age& x, const Age& y) const {
  const double d = std::abs(x.x - y.x);
  if (kind_ == CostKind::trunc_abs) return std::min(a_, d);
  if (kind_ == CostKind::power) return p_ == 1.0 ? d : std::pow(d, p_);
  unsupported(Space::age);
}

double CostFunction::operator()(const AgeState& x, const AgeState& y) const {
  if (kind_ != CostKind::trunc_abs_state) unsupported(Space::age_state);
  return x.i == y.i ? std::min(a_, std::abs(x.x - y.x)) : a_;
}

double CostFunction::operator()(const AgePosition& x, const AgePosition& y) const {
  if (kind_ != CostKind::trunc_sum) unsupported(Space::age_position);
  return std::min(a_, std::abs(x.x - y.x) + norm(x.z - y.z));
}

double CostFunction::operator()(const TimePair& x, const TimePair& y) const {
  if (kind_ != CostKind::trunc_weighted) unsupported(Space::time_pair);
  return std::min(a_, 2 * std::abs(x.x1 - y.x1) + std::abs(x.x2 - y.x2));
}

double CostFunction::operator()(const AgeSize& x, const AgeSize& y) const {
  if (kind_ != CostKind::trunc_sum) unsupported(Space::age_size);
  return std::min(a_, std::abs(x.x - y.x) + std::abs(x.z - y.z));
}

double CostFunction::operator()(const Trait& x, const Trait& y) const {
  if (x.x.dim() != y.x.dim()) throw std::invalid_argument("trait dimensions differ");
  const double d = norm(x.x - y.x);
  if (kind_ == CostKind::trunc_abs) return std::min(a_, d);
  if (kind_ == CostKind::power) return p_ == 1.0 ? d : std::pow(d, p_);
  unsupported(Space::trait);
}

double CostFunction::operator()(const StatePoint& x, const StatePoint& y) const {
  if (x.index() != y.index()) throw std::invalid_argument("cost between different state spaces");
  return std::visit(
      [&](const auto& a) {
        using S = std::decay_t<decltype(a)>;
        return (*this)(a, std::get<S>(y));
      },
      x);
}

}  // namespace popot
