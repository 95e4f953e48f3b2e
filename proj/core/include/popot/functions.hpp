#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace popot {

enum class Monotone { increasing, none };

/// Nonnegative jump rate on a scalar or two-coordinate argument.
///
/// `interval_bound(p, q)` bounds the rate along the flow segment from p to q.
/// For rates tagged increasing in each coordinate the bound is the value at
/// the coordinate-wise maximum, which is valid because every model flow moves
/// each coordinate monotonically.
template <class Arg>
class RateFunction {
 public:
  using Eval = std::function<double(const Arg&)>;
  using Bound = std::function<double(const Arg&, const Arg&)>;

  RateFunction(Eval eval, Bound bound, std::string description = "custom")
      : eval_(std::move(eval)), bound_(std::move(bound)), tag_(Monotone::none),
        description_(std::move(description)) {}

  static RateFunction monotone(Eval eval, std::string description = "monotone") {
    RateFunction r(eval, [eval](const Arg& p, const Arg& q) { return eval(coordinate_max(p, q)); },
                   std::move(description));
    r.tag_ = Monotone::increasing;
    return r;
  }

  double operator()(const Arg& p) const { return eval_(p); }
  double interval_bound(const Arg& p, const Arg& q) const { return bound_(p, q); }
  Monotone monotone_tag() const { return tag_; }
  const std::string& description() const { return description_; }

 private:
  static double coordinate_max(double p, double q) { return p > q ? p : q; }
  static std::array<double, 2> coordinate_max(const std::array<double, 2>& p,
                                              const std::array<double, 2>& q) {
    return {p[0] > q[0] ? p[0] : q[0], p[1] > q[1] ? p[1] : q[1]};
  }

  Eval eval_;
  Bound bound_;
  Monotone tag_;
  std::string description_;
};

using ScalarRate = RateFunction<double>;
using PairRate = RateFunction<std::array<double, 2>>;

ScalarRate constant_rate(double value);
/// alpha + beta * x^p with alpha, beta >= 0 and p >= 0.
ScalarRate power_rate(double alpha, double beta, double p);
/// alpha + beta * x1^p1 + gamma * x2^p2.
PairRate power_rate2(double alpha, double beta, double p1, double gamma, double p2);

/// Growth velocity g of a scalar structure variable.
///
/// Constant and affine velocities are flowed in closed form; general ones
/// with classical fourth-order Runge-Kutta on a fixed step min(0.01, dt).
class GrowthFunction {
 public:
  enum class Kind { constant, affine, general };

  static GrowthFunction constant(double c);
  /// c0 + c1 * x.
  static GrowthFunction affine(double c0, double c1);
  static GrowthFunction general(std::function<double(double)> g, bool nonincreasing,
                                std::string description = "custom");

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  bool is_nonincreasing() const { return nonincreasing_; }
  const std::string& description() const { return description_; }

  /// Position after time dt >= 0 starting from x >= 0; never leaves [0, inf).
  double flow(double x, double dt) const;

  /// One classical RK4 step of size h (h may be negative).
  double rk4_step(double x, double h) const;

  /// Checks g(0) >= 0 and, when flagged non-increasing, that forward
  /// differences on `points` uniform nodes of [lo, hi] are <= 1e-12. Throws
  /// std::invalid_argument on failure.
  void validate(double lo, double hi, std::size_t points) const;

  /// max |g| over `points` uniform nodes of [lo, hi].
  double sup_abs(double lo, double hi, std::size_t points = 1001) const;

 private:
  GrowthFunction() = default;

  Kind kind_ = Kind::constant;
  double c0_ = 0;
  double c1_ = 0;
  bool nonincreasing_ = true;
  std::function<double(double)> g_;
  std::string description_;
};

}  // namespace popot
