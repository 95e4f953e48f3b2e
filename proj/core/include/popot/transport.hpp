#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "popot/measure.hpp"
#include "popot/rng.hpp"
#include "popot/state.hpp"

namespace popot {

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0;
};

/// Finitely supported coupling between two atomic measures, listed in
/// lexicographic (source, target) order, and its cost.
struct TransportPlan {
  std::vector<PlanEntry> pairs;
  double cost = 0;
  std::string backend;
};

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  CostMatrix transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct TransportOptions {
  std::size_t atom_cap = 4096;
};

/// Equal-weight n x n problem by shortest augmenting paths, O(n^3).
TransportPlan solve_assignment(const CostMatrix& cost);

/// General marginals by the primal network simplex on the complete bipartite
/// graph. Zero-weight atoms are dropped before pivoting.
TransportPlan solve_network_simplex(std::span<const double> source, std::span<const double> target,
                                    const CostMatrix& cost);

/// Assignment when both sides are n atoms of weight 1/n, network simplex
/// otherwise.
TransportPlan solve_transport(std::span<const double> source, std::span<const double> target,
                              const CostMatrix& cost);

/// Sum of mass * cost over the plan, accumulated in plan order.
double plan_cost(const TransportPlan& plan, const CostMatrix& cost);

/// Largest absolute deviation of the plan's row and column sums from the
/// marginals.
double marginal_error(const TransportPlan& plan, std::span<const double> source,
                      std::span<const double> target);

/// Minimum over all n! permutations; equal weights, n <= 8.
double brute_force_assignment(const CostMatrix& cost);

namespace detail {

template <class S>
int compare_measures(const EmpiricalMeasure<S>& mu, const EmpiricalMeasure<S>& nu) {
  if (mu.size() != nu.size()) return mu.size() < nu.size() ? -1 : 1;
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (mu.weight(k) != nu.weight(k)) return mu.weight(k) < nu.weight(k) ? -1 : 1;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto a = coordinates(mu.atom(k));
    const auto b = coordinates(nu.atom(k));
    if (a != b) return a < b ? -1 : 1;
  }
  return 0;
}

template <class S, class Cost>
CostMatrix build_matrix(const EmpiricalMeasure<S>& mu, const EmpiricalMeasure<S>& nu,
                        const Cost& cost) {
  CostMatrix m(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) m(i, j) = cost(mu.atom(i), nu.atom(j));
  return m;
}

}  // namespace detail

/// Exact optimal transport cost between two atomic measures and a plan
/// attaining it.
///
/// The problem is always solved with the two measures in a canonical order so
/// that swapping the arguments returns the same cost bit for bit and the
/// transposed plan.
template <class S, class Cost>
TransportPlan transport_cost(const EmpiricalMeasure<S>& mu, const EmpiricalMeasure<S>& nu,
                             const Cost& cost, const TransportOptions& options = {}) {
  if (mu.size() > options.atom_cap || nu.size() > options.atom_cap)
    throw std::length_error("atom count exceeds the configured cap of " +
                            std::to_string(options.atom_cap));
  if constexpr (std::is_same_v<S, StatePoint>) {
    if (mu.atom(0).index() != nu.atom(0).index())
      throw std::invalid_argument("measures live on different state spaces");
  }
  const bool swap = detail::compare_measures(mu, nu) > 0;
  const auto& a = swap ? nu : mu;
  const auto& b = swap ? mu : nu;
  const CostMatrix m = detail::build_matrix(a, b, cost);
  TransportPlan plan = solve_transport(a.weights(), b.weights(), m);
  if (swap) {
    for (auto& e : plan.pairs) std::swap(e.source, e.target);
    std::sort(plan.pairs.begin(), plan.pairs.end(), [](const PlanEntry& x, const PlanEntry& y) {
      return std::pair(x.source, x.target) < std::pair(y.source, y.target);
    });
  }
  return plan;
}

/// Test oracle: exhaustive minimum over assignments. Both measures must have
/// the same number n <= 8 of equally weighted atoms.
template <class S, class Cost>
double brute_force_cost(const EmpiricalMeasure<S>& mu, const EmpiricalMeasure<S>& nu,
                        const Cost& cost) {
  if (mu.size() != nu.size() || mu.size() > 8)
    throw std::invalid_argument("brute force needs two measures of equal size n <= 8");
  const double w = 1.0 / static_cast<double>(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (std::abs(mu.weight(k) - w) > kWeightTolerance || std::abs(nu.weight(k) - w) > kWeightTolerance)
      throw std::invalid_argument("brute force needs equal weights");
  return brute_force_assignment(detail::build_matrix(mu, nu, cost));
}

/// n i.i.d. pairs drawn with probability proportional to the plan masses.
template <class S>
std::vector<std::pair<S, S>> sample_plan(const TransportPlan& plan, const EmpiricalMeasure<S>& mu,
                                         const EmpiricalMeasure<S>& nu, std::size_t n, Stream& rng) {
  if (plan.pairs.empty()) throw std::invalid_argument("empty transport plan");
  std::vector<double> cumulative(plan.pairs.size());
  double c = 0;
  for (std::size_t k = 0; k < plan.pairs.size(); ++k) cumulative[k] = c += plan.pairs[k].mass;
  std::vector<std::pair<S, S>> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = uniform01(rng) * c;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= plan.pairs.size()) idx = plan.pairs.size() - 1;
    const PlanEntry& e = plan.pairs[idx];
    out.emplace_back(mu.atom(e.source), nu.atom(e.target));
  }
  return out;
}

}  // namespace popot
