#include "popot/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "popot/measure.hpp"

namespace popot {

namespace {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [0, 1] with N (even) nodes.
template <unsigned N>
Rule unit_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  Rule r;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t k = x.size(); k-- > 0;) {
    r.nodes.push_back(0.5 - 0.5 * x[k]);
    r.weights.push_back(0.5 * w[k]);
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    r.nodes.push_back(0.5 + 0.5 * x[k]);
    r.weights.push_back(0.5 * w[k]);
  }
  return r;
}

const Rule& unit_rule(std::size_t n) {
  static const Rule r64 = unit_rule<64>();
  static const Rule r16 = unit_rule<16>();
  static const Rule r8 = unit_rule<8>();
  switch (n) {
    case 64: return r64;
    case 16: return r16;
    case 8: return r8;
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
  }
}

void check_weights(const std::vector<double>& w) {
  if (w.empty()) throw std::invalid_argument("law needs at least one atom");
  double total = 0;
  for (double v : w) {
    if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("law weights must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) throw std::invalid_argument("law weights must sum to 1");
}

std::vector<double> cumulate(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double s = 0;
  for (std::size_t k = 0; k < w.size(); ++k) c[k] = s += w[k];
  return c;
}

std::size_t draw_index(const std::vector<double>& cumulative, const std::vector<double>& weights,
                       Stream& rng) {
  const double u = uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
  if (k >= weights.size()) k = weights.size() - 1;
  while (weights[k] == 0 && k > 0) --k;
  return k;
}

// Nodes and weights representing a scalar law: its atoms, or an n-point
// rule mapped onto the support.
Rule law_rule(const Law& law, std::size_t n) {
  if (law.kind() == Law::Kind::atoms) return {law.values(), law.weights()};
  const Rule& u = unit_rule(n);
  Rule r = u;
  const double lo = law.lower();
  const double len = law.upper() - law.lower();
  for (double& x : r.nodes) {
    if (law.kind() == Law::Kind::uniform) x = lo + len * x;
    else x = lo + len * std::pow(x, 1.0 / (law.gamma() + 1.0));
  }
  return r;
}

// Antiderivative of v -> min(cap, |v|), odd in v.
double clipped_abs_primitive(double v, double cap) {
  const double a = std::abs(v);
  const double g = a <= cap ? 0.5 * a * a : 0.5 * cap * cap + cap * (a - cap);
  return v < 0 ? -g : g;
}

}  // namespace

Law Law::dirac(double value) { return atoms({value}, {1.0}); }

Law Law::atoms(std::vector<double> values, std::vector<double> weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("atom and weight counts differ");
  check_weights(weights);
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("law atoms must be finite");
  Law l;
  l.kind_ = Kind::atoms;
  l.values_ = std::move(values);
  l.weights_ = std::move(weights);
  l.cumulative_ = cumulate(l.weights_);
  l.lo_ = *std::min_element(l.values_.begin(), l.values_.end());
  l.hi_ = *std::max_element(l.values_.begin(), l.values_.end());
  return l;
}

Law Law::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw std::invalid_argument("uniform law needs lo < hi");
  Law l;
  l.kind_ = Kind::uniform;
  l.lo_ = lo;
  l.hi_ = hi;
  return l;
}

Law Law::power(double lo, double hi, double gamma) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw std::invalid_argument("power law needs lo < hi");
  if (!(gamma > -1) || !std::isfinite(gamma)) throw std::invalid_argument("power law needs gamma > -1");
  Law l;
  l.kind_ = Kind::power;
  l.lo_ = lo;
  l.hi_ = hi;
  l.gamma_ = gamma;
  return l;
}

double Law::sample(Stream& rng) const {
  switch (kind_) {
    case Kind::atoms: return values_[draw_index(cumulative_, weights_, rng)];
    case Kind::uniform: return lo_ + (hi_ - lo_) * uniform01(rng);
    case Kind::power: return lo_ + (hi_ - lo_) * std::pow(uniform01(rng), 1.0 / (gamma_ + 1.0));
  }
  return 0;
}

double Law::mean() const {
  switch (kind_) {
    case Kind::atoms: {
      double s = 0;
      for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * weights_[k];
      return s;
    }
    case Kind::uniform: return 0.5 * (lo_ + hi_);
    case Kind::power: return lo_ + (hi_ - lo_) * (gamma_ + 1.0) / (gamma_ + 2.0);
  }
  return 0;
}

double Law::second_moment() const {
  switch (kind_) {
    case Kind::atoms: {
      double s = 0;
      for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * values_[k] * weights_[k];
      return s;
    }
    case Kind::uniform: return (lo_ * lo_ + lo_ * hi_ + hi_ * hi_) / 3.0;
    case Kind::power: {
      const double len = hi_ - lo_;
      const double m1 = (gamma_ + 1.0) / (gamma_ + 2.0);
      const double m2 = (gamma_ + 1.0) / (gamma_ + 3.0);
      return lo_ * lo_ + 2 * lo_ * len * m1 + len * len * m2;
    }
  }
  return 0;
}

Expectation Law::expect(const std::function<double(double)>& f) const {
  const Rule r = law_rule(*this, 64);
  double s = 0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * f(r.nodes[k]);
  return {s, kind_ != Kind::atoms};
}

Expectation Law::expect_min_abs_affine(double cap, double slope, double offset) const {
  const auto m = [&](double v) { return std::min(cap, std::abs(v)); };
  if (kind_ == Kind::atoms || slope == 0) {
    if (slope == 0) return {m(offset), false};
    double s = 0;
    for (std::size_t k = 0; k < values_.size(); ++k) s += weights_[k] * m(slope * values_[k] + offset);
    return {s, false};
  }
  if (kind_ == Kind::uniform) {
    double v0 = slope * lo_ + offset;
    double v1 = slope * hi_ + offset;
    if (v0 > v1) std::swap(v0, v1);
    const double width = v1 - v0;
    if (!(width > 0)) return {m(0.5 * (v0 + v1)), false};
    if (std::isinf(cap)) {
      // E|V| for V uniform on [v0, v1].
      const double g1 = 0.5 * v1 * std::abs(v1);
      const double g0 = 0.5 * v0 * std::abs(v0);
      return {(g1 - g0) / width, false};
    }
    return {(clipped_abs_primitive(v1, cap) - clipped_abs_primitive(v0, cap)) / width, false};
  }
  return expect([&](double x) { return m(slope * x + offset); });
}

VectorLaw VectorLaw::atoms(std::vector<Vec> values, std::vector<double> weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("atom and weight counts differ");
  check_weights(weights);
  const std::size_t dim = values.front().dim();
  for (const Vec& v : values) {
    if (v.dim() != dim || dim == 0) throw std::invalid_argument("vector atoms must share one dimension");
    for (std::size_t k = 0; k < dim; ++k)
      if (!std::isfinite(v[k])) throw std::invalid_argument("vector atoms must be finite");
  }
  VectorLaw l;
  l.dim_ = dim;
  l.values_ = std::move(values);
  l.weights_ = std::move(weights);
  l.cumulative_ = cumulate(l.weights_);
  return l;
}

VectorLaw VectorLaw::product(std::vector<Law> factors) {
  if (factors.empty() || factors.size() > Vec::kCapacity)
    throw std::invalid_argument("product law needs 1 to 3 factors");
  VectorLaw l;
  l.dim_ = factors.size();
  l.factors_ = std::move(factors);
  return l;
}

Vec VectorLaw::sample(Stream& rng) const {
  if (atomic()) return values_[draw_index(cumulative_, weights_, rng)];
  Vec v(dim_);
  for (std::size_t k = 0; k < dim_; ++k) v[k] = factors_[k].sample(rng);
  return v;
}

Vec VectorLaw::mean() const {
  Vec m(dim_);
  if (atomic()) {
    for (std::size_t a = 0; a < values_.size(); ++a)
      for (std::size_t k = 0; k < dim_; ++k) m[k] += weights_[a] * values_[a][k];
  } else {
    for (std::size_t k = 0; k < dim_; ++k) m[k] = factors_[k].mean();
  }
  return m;
}

Expectation VectorLaw::expect(const std::function<double(const Vec&)>& f) const {
  if (atomic()) {
    double s = 0;
    for (std::size_t a = 0; a < values_.size(); ++a) s += weights_[a] * f(values_[a]);
    return {s, false};
  }
  const std::size_t order = dim_ == 1 ? 64 : dim_ == 2 ? 16 : 8;
  std::vector<Rule> rules;
  bool quadrature = false;
  for (const Law& law : factors_) {
    rules.push_back(law_rule(law, order));
    quadrature = quadrature || law.kind() != Law::Kind::atoms;
  }
  double s = 0;
  std::vector<std::size_t> idx(dim_, 0);
  Vec v(dim_);
  while (true) {
    double w = 1;
    for (std::size_t k = 0; k < dim_; ++k) {
      v[k] = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    s += w * f(v);
    std::size_t k = 0;
    while (k < dim_ && ++idx[k] == rules[k].nodes.size()) idx[k++] = 0;
    if (k == dim_) break;
  }
  return {s, quadrature};
}

BirthLaw::BirthLaw(Law law) : law_(std::move(law)) {
  if (law_.lower() < 0) throw std::invalid_argument("birth law must live on [0, inf)");
}

SpatialNoise::SpatialNoise(VectorLaw law, double scale) : law_(std::move(law)), scale_(scale) {
  if (!(scale > 0) || !std::isfinite(scale)) throw std::invalid_argument("noise scale must be > 0");
}

FragmentRatio::FragmentRatio(Law law) : law_(std::move(law)) {
  if (law_.lower() < 0 || law_.upper() > 1)
    throw std::invalid_argument("fragment ratio law must live on [0, 1]");
  mean_r_ = law_.mean();
  if (!(mean_r_ < 1)) throw std::invalid_argument("fragment ratio needs mean < 1");
}

MatingMix::MatingMix(Law law, double theta, double p) : law_(std::move(law)), theta_(theta), p_(p) {
  if (law_.lower() < 0 || law_.upper() > 1)
    throw std::invalid_argument("mixing law must live on [0, 1]");
  if (!(theta > 0 && theta < 1)) throw std::invalid_argument("theta must lie in (0, 1)");
  if (std::abs(law_.mean() - theta) > 1e-10)
    throw std::invalid_argument("theta must equal the mean of the mixing law");
  if (!(p >= 1) || !std::isfinite(p)) throw std::invalid_argument("cost exponent p must be >= 1");
}

MatingMix::MatingMix(Law law, double p) : MatingMix(law, law.mean(), p) {}

}  // namespace popot
