#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "popot/rng.hpp"
#include "popot/state.hpp"

namespace popot {

/// Value of an integral against a law. `quadrature` is set when the value
/// came from Gauss-Legendre quadrature rather than an exact sum or a closed
/// form.
struct Expectation {
  double value = 0;
  bool quadrature = false;
};

/// Probability law on the real line with an exact sampler.
///
/// Three families are supported: finite atoms, uniform on an interval, and the
/// truncated power family with density proportional to (x - lo)^gamma on
/// [lo, hi], gamma > -1.
class Law {
 public:
  enum class Kind { atoms, uniform, power };

  static Law dirac(double value);
  static Law atoms(std::vector<double> values, std::vector<double> weights);
  static Law uniform(double lo, double hi);
  static Law power(double lo, double hi, double gamma);

  Kind kind() const { return kind_; }
  double sample(Stream& rng) const;

  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }

  double mean() const;
  double second_moment() const;

  Expectation expect(const std::function<double(double)>& f) const;

  /// E[min(cap, |slope * X + offset|)]. Exact for atoms and uniform laws.
  Expectation expect_min_abs_affine(double cap, double slope, double offset) const;

 private:
  Law() = default;

  Kind kind_ = Kind::atoms;
  double lo_ = 0;
  double hi_ = 0;
  double gamma_ = 0;
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Probability law on R^dim: finite atoms or a product of scalar laws.
class VectorLaw {
 public:
  static VectorLaw atoms(std::vector<Vec> values, std::vector<double> weights);
  static VectorLaw product(std::vector<Law> factors);

  std::size_t dim() const { return dim_; }
  bool atomic() const { return factors_.empty(); }
  const std::vector<Vec>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Law>& factors() const { return factors_; }

  Vec sample(Stream& rng) const;
  Vec mean() const;

  /// Exact for atoms; tensor Gauss-Legendre (64, 16 or 8 nodes per axis for
  /// dim 1, 2, 3) for continuous factors.
  Expectation expect(const std::function<double(const Vec&)>& f) const;

 private:
  VectorLaw() = default;

  std::size_t dim_ = 0;
  std::vector<Vec> values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::vector<Law> factors_;
};

/// Offspring age law b on [0, inf).
class BirthLaw {
 public:
  explicit BirthLaw(Law law);
  const Law& law() const { return law_; }
  double sample(Stream& rng) const { return law_.sample(rng); }

 private:
  Law law_;
};

/// Displacement law k on R^dim together with the jump scale eps.
class SpatialNoise {
 public:
  SpatialNoise(VectorLaw law, double scale);
  const VectorLaw& law() const { return law_; }
  double scale() const { return scale_; }
  std::size_t dim() const { return law_.dim(); }
  Vec sample(Stream& rng) const { return law_.sample(rng); }

 private:
  VectorLaw law_;
  double scale_;
};

/// Fragment ratio law beta on [0, 1]; requires mean ratio in [0, 1).
class FragmentRatio {
 public:
  explicit FragmentRatio(Law law);
  const Law& law() const { return law_; }
  double mean_ratio() const { return mean_r_; }
  double sample(Stream& rng) const { return law_.sample(rng); }

 private:
  Law law_;
  double mean_r_;
};

/// Mixing law h on [0, 1] of the offspring kernel, its mean theta and the
/// cost exponent p. Construction checks |mean(h) - theta| <= 1e-10.
class MatingMix {
 public:
  MatingMix(Law law, double theta, double p);
  /// theta taken as the mean of h.
  MatingMix(Law law, double p);

  const Law& law() const { return law_; }
  double theta() const { return theta_; }
  double p() const { return p_; }
  double sample(Stream& rng) const { return law_.sample(rng); }

 private:
  Law law_;
  double theta_;
  double p_;
};

}  // namespace popot
