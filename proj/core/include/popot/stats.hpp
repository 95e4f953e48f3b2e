#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace popot {

double mean(std::span<const double> v);
/// Standard error of the mean with the unbiased variance estimator; 0 for
/// fewer than two values.
double standard_error(std::span<const double> v);

/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

/// Two-sample Kolmogorov-Smirnov test. Ties are handled by advancing both
/// samples past equal values before taking the gap.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Multivariate comparison by one KS test per coordinate plus one on the sum
/// of coordinates, combined with a Bonferroni correction. `a[k]` and `b[k]`
/// are flat coordinate vectors of equal length. Returns the corrected p-value
/// (min over tests times the number of tests, capped at 1).
double ks_projections(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b);

/// Same projections for samples made of independent clusters of dependent
/// points (for example replicas of an interacting population). Element k of
/// a sample of size n with c clusters belongs to cluster floor(k c / n). The
/// largest scaled KS distance over the projections, taken at up to 1024
/// pooled quantiles, is calibrated by
/// reassigning whole clusters between the samples at random; returns
/// (1 + #{permuted >= observed}) / (permutations + 1).
double ks_projections_clustered(const std::vector<std::vector<double>>& a, std::size_t clusters_a,
                                const std::vector<std::vector<double>>& b, std::size_t clusters_b,
                                std::size_t permutations, std::uint64_t seed);

}  // namespace popot
