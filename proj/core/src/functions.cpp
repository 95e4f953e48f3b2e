#include "popot/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace popot {

namespace {

constexpr double kFlowStep = 0.01;
constexpr double kMonotoneTolerance = 1e-12;

std::string format(const char* pattern, double a, double b, double c) {
  std::ostringstream os;
  os << pattern << " (" << a << ", " << b << ", " << c << ")";
  return os.str();
}

}  // namespace

ScalarRate constant_rate(double value) {
  if (!(value >= 0) || !std::isfinite(value)) throw std::invalid_argument("rate must be >= 0");
  return ScalarRate::monotone([value](double) { return value; }, "constant " + std::to_string(value));
}

ScalarRate power_rate(double alpha, double beta, double p) {
  if (!(alpha >= 0) || !(beta >= 0) || !(p >= 0))
    throw std::invalid_argument("power rate needs alpha, beta, p >= 0");
  return ScalarRate::monotone(
      [alpha, beta, p](double x) { return alpha + beta * std::pow(std::max(x, 0.0), p); },
      format("alpha + beta x^p", alpha, beta, p));
}

PairRate power_rate2(double alpha, double beta, double p1, double gamma, double p2) {
  if (!(alpha >= 0) || !(beta >= 0) || !(gamma >= 0) || !(p1 >= 0) || !(p2 >= 0))
    throw std::invalid_argument("power rate needs nonnegative coefficients and exponents");
  std::ostringstream os;
  os << "alpha + beta x1^p1 + gamma x2^p2 (" << alpha << ", " << beta << ", " << p1 << ", "
     << gamma << ", " << p2 << ")";
  return PairRate::monotone(
      [=](const std::array<double, 2>& x) {
        return alpha + beta * std::pow(std::max(x[0], 0.0), p1) +
               gamma * std::pow(std::max(x[1], 0.0), p2);
      },
      os.str());
}

GrowthFunction GrowthFunction::constant(double c) {
  if (!(c >= 0) || !std::isfinite(c)) throw std::invalid_argument("g(0) must be >= 0");
  GrowthFunction f;
  f.kind_ = Kind::constant;
  f.c0_ = c;
  f.nonincreasing_ = true;
  f.description_ = "constant " + std::to_string(c);
  return f;
}

GrowthFunction GrowthFunction::affine(double c0, double c1) {
  if (!(c0 >= 0) || !std::isfinite(c0) || !std::isfinite(c1))
    throw std::invalid_argument("g(0) must be >= 0");
  if (c1 == 0) return constant(c0);
  GrowthFunction f;
  f.kind_ = Kind::affine;
  f.c0_ = c0;
  f.c1_ = c1;
  f.nonincreasing_ = c1 <= 0;
  std::ostringstream os;
  os << "affine " << c0 << " + " << c1 << " x";
  f.description_ = os.str();
  return f;
}

GrowthFunction GrowthFunction::general(std::function<double(double)> g, bool nonincreasing,
                                       std::string description) {
  if (!g) throw std::invalid_argument("empty growth function");
  GrowthFunction f;
  f.kind_ = Kind::general;
  f.g_ = std::move(g);
  f.nonincreasing_ = nonincreasing;
  f.description_ = std::move(description);
  return f;
}

double GrowthFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return c0_;
    case Kind::affine: return c0_ + c1_ * x;
    case Kind::general: return g_(x);
  }
  return 0;
}

double GrowthFunction::rk4_step(double x, double h) const {
  const GrowthFunction& g = *this;
  const double k1 = g(x);
  const double k2 = g(x + 0.5 * h * k1);
  const double k3 = g(x + 0.5 * h * k2);
  const double k4 = g(x + h * k3);
  return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

double GrowthFunction::flow(double x, double dt) const {
  if (dt <= 0) return x;
  double y = x;
  switch (kind_) {
    case Kind::constant:
      y = x + c0_ * dt;
      break;
    case Kind::affine:
      y = x + (c0_ + c1_ * x) * std::expm1(c1_ * dt) / c1_;
      break;
    case Kind::general: {
      const auto steps = static_cast<std::size_t>(std::ceil(dt / kFlowStep));
      const double h = dt / static_cast<double>(steps);
      for (std::size_t k = 0; k < steps; ++k) y = rk4_step(y, h);
      break;
    }
  }
  return std::max(y, 0.0);
}

void GrowthFunction::validate(double lo, double hi, std::size_t points) const {
  if ((*this)(0.0) < 0) throw std::invalid_argument("growth needs g(0) >= 0");
  if (!nonincreasing_ || points < 2) return;
  double prev = (*this)(lo);
  for (std::size_t k = 1; k < points; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    const double v = (*this)(x);
    if (v - prev > kMonotoneTolerance)
      throw std::invalid_argument("growth flagged non-increasing increases near x = " +
                                  std::to_string(x));
    prev = v;
  }
}

double GrowthFunction::sup_abs(double lo, double hi, std::size_t points) const {
  double s = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const double x =
        points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    s = std::max(s, std::abs((*this)(x)));
  }
  return s;
}

}  // namespace popot
