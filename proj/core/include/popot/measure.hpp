#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "popot/rng.hpp"
#include "popot/state.hpp"

namespace popot {

inline constexpr double kWeightTolerance = 1e-12;

/// Weighted atom cloud standing in for a probability measure.
///
/// Weights are nonnegative and sum to one within kWeightTolerance; every atom
/// lies in the state space. For S = StatePoint all atoms must also share one
/// variant.
template <class S>
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<S> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
    if (atoms_.size() != weights_.size())
      throw std::invalid_argument("atom and weight counts differ");
    // Neumaier summation keeps the check exact enough for large clouds.
    double total = 0, carry = 0;
    for (double w : weights_) {
      if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("weights must be nonnegative");
      const double t = total + w;
      carry += std::abs(total) >= w ? (total - t) + w : (w - t) + total;
      total = t;
    }
    total += carry;
    if (std::abs(total - 1.0) > kWeightTolerance)
      throw std::invalid_argument("weights must sum to 1");
    for (const S& a : atoms_) {
      if (!in_space(a)) throw std::invalid_argument("atom outside its state space");
      if constexpr (std::is_same_v<S, StatePoint>) {
        if (a.index() != atoms_.front().index())
          throw std::invalid_argument("atoms mix state-space variants");
      }
    }
    cumulative_.resize(weights_.size());
    double c = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k) cumulative_[k] = c += weights_[k];
  }

  /// Equal weights 1/n.
  static EmpiricalMeasure uniform(std::vector<S> atoms) {
    const std::size_t n = atoms.size();
    return EmpiricalMeasure(std::move(atoms), std::vector<double>(n, n ? 1.0 / n : 0.0));
  }

  std::size_t size() const { return atoms_.size(); }
  const std::vector<S>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const S& atom(std::size_t k) const { return atoms_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }

  /// Index drawn with probability proportional to the weights.
  std::size_t sample_index(Stream& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    // u can round up to the total; fall back to the last positive atom.
    if (k >= atoms_.size()) k = atoms_.size() - 1;
    while (weights_[k] == 0 && k > 0) --k;
    return k;
  }

  /// n i.i.d. draws; deterministic given the stream state.
  std::vector<S> sample(std::size_t n, Stream& rng) const {
    if (n == 0) throw std::invalid_argument("sample count must be at least 1");
    std::vector<S> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(atoms_[sample_index(rng)]);
    return out;
  }

 private:
  std::vector<S> atoms_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

}  // namespace popot
