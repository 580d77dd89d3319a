#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rantail {

struct LatencySummary {
  std::size_t n = 0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double mean_ms = 0.0;
  double exceed_100ms = 0.0;
  double exceed_1s = 0.0;
  double outlier_rate = 0.0;
};

struct KsResult {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double d_stat = 0.0;
  double p_value = 1.0;
};

/// Linear interpolation between closest ranks: with the input sorted
/// ascending, rank h = (n - 1) q + 1 and the result blends x[floor(h)] and
/// x[floor(h) + 1] (1-based). q = 0 gives the minimum, q = 1 the maximum.
double percentile(std::span<const double> values, double q);

/// Same rule on an already ascending sequence; no copy.
double percentile_sorted(std::span<const double> sorted, double q);

/// Fraction of values strictly above `threshold`.
double exceedance_prob(std::span<const double> values, double threshold);

LatencySummary summary_stats(std::span<const double> values, double outlier_threshold_ms = 1000.0);

double mean(std::span<const double> values);

/// Asymptotic two-sided Kolmogorov tail probability Q(lambda) with the
/// small-sample correction applied to the effective size n1 n2 / (n1 + n2).
double ks_pvalue(double d_stat, std::size_t n1, std::size_t n2);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based); tied values share the mean of their rank span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman's rho as the Pearson correlation of average ranks. Empty when
/// either side has zero rank variance.
std::optional<double> spearman_rho(std::span<const double> x, std::span<const double> y);

}  // namespace rantail
