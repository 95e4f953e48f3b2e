#include "popot/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "popot/rng.hpp"

namespace popot {

namespace {

double p_value(double d, double n_eff) {
  const double s = std::sqrt(n_eff);
  return kolmogorov_tail((s + 0.12 + 0.11 / s) * d);
}

}  // namespace

double mean(std::span<const double> v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0;
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1) / n);
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0) return 1.0;
  using std::numbers::pi;
  if (lambda < 1.18) {
    // P(K <= lambda) = sqrt(2 pi) / lambda * sum exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
    double s = 0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1.0;
      s += std::exp(-j * j * pi * pi / (8 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, p_value(d, na * nb / (na + nb))};
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double f = cdf(sample[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return {d, p_value(d, n)};
}

namespace {

// Coordinate t of every point, or the coordinate sum when t == dim.
std::vector<double> projection(const std::vector<std::vector<double>>& s, std::size_t dim, std::size_t t) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& p : s) {
    if (p.size() != dim) throw std::invalid_argument("samples differ in dimension");
    if (t < dim) {
      out.push_back(p[t]);
    } else {
      double sum = 0;
      for (double c : p) sum += c;
      out.push_back(sum);
    }
  }
  return out;
}

std::size_t projection_count(std::size_t dim) { return dim == 1 ? 1 : dim + 1; }

}  // namespace

double ks_projections(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  const std::size_t dim = a.front().size();
  const std::size_t tests = projection_count(dim);
  double pmin = 1.0;
  for (std::size_t t = 0; t < tests; ++t)
    pmin = std::min(pmin, ks_two_sample(projection(a, dim, t), projection(b, dim, t)).p_value);
  return std::min(1.0, pmin * static_cast<double>(tests));
}

double ks_projections_clustered(const std::vector<std::vector<double>>& a, std::size_t clusters_a,
                                const std::vector<std::vector<double>>& b, std::size_t clusters_b,
                                std::size_t permutations, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  if (clusters_a == 0 || clusters_b == 0 || clusters_a > a.size() || clusters_b > b.size())
    throw std::invalid_argument("cluster counts must lie in [1, sample size]");
  const std::size_t dim = a.front().size();
  const std::size_t tests = projection_count(dim);
  const std::size_t nclusters = clusters_a + clusters_b;

  std::vector<double> sizes(nclusters, 0.0);
  const auto cluster_of = [](std::size_t k, std::size_t n, std::size_t c) { return k * c / n; };
  for (std::size_t k = 0; k < a.size(); ++k) sizes[cluster_of(k, a.size(), clusters_a)] += 1;
  for (std::size_t k = 0; k < b.size(); ++k) sizes[clusters_a + cluster_of(k, b.size(), clusters_b)] += 1;

  // Per projection: cumulative counts of every cluster at up to kGrid pooled
  // quantiles, stored cluster-major.
  constexpr std::size_t kGrid = 1024;
  struct Counts {
    std::size_t points = 0;
    std::vector<double> g;
  };
  std::vector<Counts> counts(tests);
  for (std::size_t t = 0; t < tests; ++t) {
    const auto pa = projection(a, dim, t);
    const auto pb = projection(b, dim, t);
    std::vector<std::pair<double, std::uint32_t>> pooled;
    pooled.reserve(pa.size() + pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k)
      pooled.emplace_back(pa[k], static_cast<std::uint32_t>(cluster_of(k, pa.size(), clusters_a)));
    for (std::size_t k = 0; k < pb.size(); ++k)
      pooled.emplace_back(pb[k], static_cast<std::uint32_t>(clusters_a + cluster_of(k, pb.size(), clusters_b)));
    std::sort(pooled.begin(), pooled.end());
    const std::size_t n = pooled.size();
    std::vector<double> running(nclusters, 0.0);
    std::vector<std::vector<double>> snapshots;
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) {
      running[pooled[k].second] += 1;
      const bool run_end = k + 1 == n || pooled[k + 1].first != pooled[k].first;
      if (run_end && (k + 1) * kGrid >= (next + 1) * n) {
        snapshots.push_back(running);
        while ((next + 1) * n <= (k + 1) * kGrid) ++next;
      }
    }
    Counts& c = counts[t];
    c.points = snapshots.size();
    c.g.resize(nclusters * c.points);
    for (std::size_t q = 0; q < c.points; ++q)
      for (std::size_t j = 0; j < nclusters; ++j) c.g[j * c.points + q] = snapshots[q][j];
  }

  // Largest scaled CDF gap over the projections for one split of the clusters.
  std::vector<char> in_a(nclusters);
  std::vector<double> gap;
  const auto statistic = [&] {
    double na = 0, nb = 0;
    for (std::size_t c = 0; c < nclusters; ++c) (in_a[c] ? na : nb) += sizes[c];
    const double scale = std::sqrt(na * nb / (na + nb));
    double worst = 0;
    for (const Counts& cnt : counts) {
      gap.assign(cnt.points, 0.0);
      for (std::size_t c = 0; c < nclusters; ++c) {
        const double w = in_a[c] ? 1.0 / na : -1.0 / nb;
        const double* row = cnt.g.data() + c * cnt.points;
        for (std::size_t q = 0; q < cnt.points; ++q) gap[q] += w * row[q];
      }
      for (double v : gap) worst = std::max(worst, std::abs(v));
    }
    return worst * scale;
  };

  for (std::size_t c = 0; c < nclusters; ++c) in_a[c] = c < clusters_a;
  const double observed = statistic();
  std::vector<std::size_t> order(nclusters);
  std::iota(order.begin(), order.end(), 0);
  Stream rng = stream_for(seed, 0);
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < permutations; ++r) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < nclusters; ++k) in_a[order[k]] = k < clusters_a;
    if (statistic() >= observed * (1 - 1e-12)) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(permutations + 1);
}

}  // namespace popot
