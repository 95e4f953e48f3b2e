#include "popot/admissibility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace popot {

namespace {

constexpr std::size_t kPairRefine = 9;

void check_grid(const GridSpec& g) {
  if (g.points < 2 || !(g.lo < g.hi) || !std::isfinite(g.lo) || !std::isfinite(g.hi))
    throw std::invalid_argument("validation grid is empty");
}

double spacing(const GridSpec& g) { return (g.hi - g.lo) / static_cast<double>(g.points - 1); }

double node(const GridSpec& g, std::size_t k) {
  return k + 1 == g.points ? g.hi : g.lo + spacing(g) * static_cast<double>(k);
}

// Local grid of n points on [c - 2h, c + 2h] clipped to [lo, hi].
std::vector<double> local_nodes(double c, double h, double lo, double hi, std::size_t n) {
  const double a = std::max(lo, c - 2 * h);
  const double b = std::min(hi, c + 2 * h);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

struct Tracker {
  double a;
  double factor;
  double best = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  std::vector<double> first{};
  std::vector<double> second{};

  // `sep` is the ratio numerator; rates r1, r2.
  void consider(double sep, double r1, double r2, const std::vector<double>& p,
                const std::vector<double>& q) {
    const double gap = std::abs(r1 - r2);
    if (gap == 0) return;
    ++count;
    const double ratio = factor * sep * std::max(r1, r2) / gap;
    if (ratio < best) {
      best = ratio;
      first = p;
      second = q;
    }
  }

  AdmissibilityReport report() const {
    AdmissibilityReport r;
    r.min_ratio = best;
    r.pairs_checked = count;
    r.valid = a <= best * (1.0 + kAdmissibilityRoundoff);
    if (!r.valid) r.witness = Witness{first, second, a, best};
    return r;
  }
};

Tracker scan_scalar(const ScalarRate& rate, double a, const GridSpec& grid, double factor) {
  check_grid(grid);
  if (!(a > 0)) throw std::invalid_argument("candidate a must be > 0");
  const double h = spacing(grid);
  std::vector<double> xs(grid.points), ds(grid.points);
  for (std::size_t k = 0; k < grid.points; ++k) {
    xs[k] = node(grid, k);
    ds[k] = rate(xs[k]);
  }
  Tracker t{a, factor};
  const double reach = a * (1.0 + kAdmissibilityRoundoff);
  for (std::size_t k = 0; k < grid.points; ++k) {
    for (std::size_t l = k + 1; l < grid.points && xs[l] - xs[k] <= reach; ++l)
      t.consider(xs[l] - xs[k], ds[k], ds[l], {xs[k]}, {xs[l]});
    // Pair at exactly the truncation level, which the grid may not contain.
    const double y = xs[k] + a;
    if (y <= grid.hi) t.consider(a, ds[k], rate(y), {xs[k]}, {y});
  }
  if (!t.first.empty()) {
    const auto px = local_nodes(t.first[0], h, grid.lo, grid.hi, grid.refine);
    const auto py = local_nodes(t.second[0], h, grid.lo, grid.hi, grid.refine);
    std::vector<double> dx(px.size()), dy(py.size());
    for (std::size_t k = 0; k < px.size(); ++k) dx[k] = rate(px[k]);
    for (std::size_t k = 0; k < py.size(); ++k) dy[k] = rate(py[k]);
    for (std::size_t k = 0; k < px.size(); ++k)
      for (std::size_t l = 0; l < py.size(); ++l) {
        const double sep = std::abs(px[k] - py[l]);
        if (sep <= reach) t.consider(sep, dx[k], dy[l], {px[k]}, {py[l]});
      }
  }
  return t;
}

Tracker scan_pair(const PairRate& rate, double a, const GridSpec& g0, const GridSpec& g1,
                  const PairMetric& m, double factor) {
  check_grid(g0);
  check_grid(g1);
  if (!(a > 0)) throw std::invalid_argument("candidate a must be > 0");
  const double h0 = spacing(g0);
  const double h1 = spacing(g1);
  const std::size_t n0 = g0.points;
  const std::size_t n1 = g1.points;
  std::vector<double> u(n0), v(n1);
  for (std::size_t k = 0; k < n0; ++k) u[k] = node(g0, k);
  for (std::size_t k = 0; k < n1; ++k) v[k] = node(g1, k);
  const auto inside = [&](double x0, double x1) { return !m.wedge || x1 > x0; };
  std::vector<double> d(n0 * n1, 0);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      if (inside(u[i], v[j])) d[i * n1 + j] = rate({u[i], v[j]});

  Tracker t{a, factor};
  const double reach = a * (1.0 + kAdmissibilityRoundoff);
  const auto region = [&](double du, double dv) { return m.region_w[0] * du + m.region_w[1] * dv; };
  const auto numer = [&](double du, double dv) { return m.ratio_w[0] * du + m.ratio_w[1] * dv; };
  const auto max_di = static_cast<std::ptrdiff_t>(m.region_w[0] > 0 ? a / (m.region_w[0] * h0) + 1 : n0);
  const auto max_dj = static_cast<std::ptrdiff_t>(m.region_w[1] > 0 ? a / (m.region_w[1] * h1) + 1 : n1);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      if (!inside(u[i], v[j])) continue;
      const double r1 = d[i * n1 + j];
      // Visit each unordered pair once: partner index strictly after (i, j).
      for (std::ptrdiff_t di = 0; di <= max_di; ++di) {
        const std::size_t k = i + static_cast<std::size_t>(di);
        if (k >= n0) break;
        for (std::ptrdiff_t dj = di == 0 ? 1 : -max_dj; dj <= max_dj; ++dj) {
          const std::ptrdiff_t lj = static_cast<std::ptrdiff_t>(j) + dj;
          if (lj < 0 || lj >= static_cast<std::ptrdiff_t>(n1)) continue;
          const auto l = static_cast<std::size_t>(lj);
          if (!inside(u[k], v[l])) continue;
          const double du = u[k] - u[i];
          const double dv = std::abs(v[l] - v[j]);
          if (region(du, dv) > reach) continue;
          t.consider(numer(du, dv), r1, d[k * n1 + l], {u[i], v[j]}, {u[k], v[l]});
        }
      }
    }
  if (!t.first.empty()) {
    const auto p0 = local_nodes(t.first[0], h0, g0.lo, g0.hi, kPairRefine);
    const auto p1 = local_nodes(t.first[1], h1, g1.lo, g1.hi, kPairRefine);
    const auto q0 = local_nodes(t.second[0], h0, g0.lo, g0.hi, kPairRefine);
    const auto q1 = local_nodes(t.second[1], h1, g1.lo, g1.hi, kPairRefine);
    for (double a0 : p0)
      for (double a1 : p1) {
        if (!inside(a0, a1)) continue;
        const double ra = rate({a0, a1});
        for (double b0 : q0)
          for (double b1 : q1) {
            if (!inside(b0, b1)) continue;
            const double du = std::abs(a0 - b0);
            const double dv = std::abs(a1 - b1);
            if (region(du, dv) > reach) continue;
            t.consider(numer(du, dv), ra, rate({b0, b1}), {a0, a1}, {b0, b1});
          }
      }
  }
  return t;
}

double suggestion(double a0) {
  if (!(a0 > 0)) throw std::domain_error("rate condition degenerates (a0 = 0); no admissible a");
  return kSuggestSafety * std::min(a0, 1.0);
}

}  // namespace

AdmissibilityReport admissible_a(const ScalarRate& rate, double candidate_a, const GridSpec& grid,
                                 double factor) {
  return scan_scalar(rate, candidate_a, grid, factor).report();
}

AdmissibilityReport admissible_a(const PairRate& rate, double candidate_a, const GridSpec& grid0,
                                 const GridSpec& grid1, const PairMetric& metric, double factor) {
  return scan_pair(rate, candidate_a, grid0, grid1, metric, factor).report();
}

double suggest_a(const ScalarRate& rate, const GridSpec& grid, double factor) {
  return suggestion(scan_scalar(rate, 1.0, grid, factor).best);
}

double suggest_a(const PairRate& rate, const GridSpec& grid0, const GridSpec& grid1,
                 const PairMetric& metric, double factor) {
  return suggestion(scan_pair(rate, 1.0, grid0, grid1, metric, factor).best);
}

}  // namespace popot
