#include "rantail/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "rantail/error.hpp"

namespace rantail {
namespace {

void require_non_empty(std::span<const double> values, const char* what) {
  if (values.empty()) throw Error(ErrorKind::EmptySequence, std::string(what) + " of an empty sequence");
}

void require_unit(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::InvalidSpec, "percentile level must lie in [0,1]");
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

std::size_t count_above(std::span<const double> values, double threshold) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
}

constexpr int kKsMaxTerms = 100;
constexpr double kKsTermEps = 1e-12;

}  // namespace

double percentile_sorted(std::span<const double> sorted, double q) {
  require_non_empty(sorted, "percentile");
  require_unit(q);
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  const double a = sorted[lo];
  const double b = sorted[lo + 1];
  return std::clamp(a + frac * (b - a), a, b);
}

double percentile(std::span<const double> values, double q) {
  require_non_empty(values, "percentile");
  const auto v = sorted_copy(values);
  return percentile_sorted(v, q);
}

double exceedance_prob(std::span<const double> values, double threshold) {
  require_non_empty(values, "exceedance");
  return static_cast<double>(count_above(values, threshold)) / static_cast<double>(values.size());
}

double mean(std::span<const double> values) {
  require_non_empty(values, "mean");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

LatencySummary summary_stats(std::span<const double> values, double outlier_threshold_ms) {
  require_non_empty(values, "summary");
  const auto v = sorted_copy(values);
  LatencySummary s;
  s.n = v.size();
  s.median_ms = percentile_sorted(v, 0.5);
  s.p95_ms = percentile_sorted(v, 0.95);
  s.mean_ms = mean(v);
  s.exceed_100ms = exceedance_prob(v, 100.0);
  s.exceed_1s = exceedance_prob(v, 1000.0);
  s.outlier_rate = exceedance_prob(v, outlier_threshold_ms);
  return s;
}

double ks_pvalue(double d_stat, std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw Error(ErrorKind::EmptySequence, "KS test needs two non-empty samples");
  if (!(d_stat >= 0.0 && d_stat <= 1.0)) throw Error(ErrorKind::InvalidSpec, "KS statistic must lie in [0,1]");
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
  const double root = std::sqrt(ne);
  const double lambda = (root + 0.12 + 0.11 / root) * d_stat;
  if (lambda == 0.0) return 1.0;

  const double a = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= kKsMaxTerms; ++k) {
    const double term = sign * 2.0 * std::exp(a * k * k);
    sum += term;
    if (std::fabs(term) < kKsTermEps) return std::clamp(sum, 0.0, 1.0);
    sign = -sign;
  }
  // Only tiny lambda fails to converge within the term budget, where the
  // tail probability is 1 to many digits.
  return 1.0;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySequence, "KS test needs two non-empty samples");
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const auto n1 = static_cast<std::int64_t>(x.size());
  const auto n2 = static_cast<std::int64_t>(y.size());

  // ECDF gap at each support point, kept as the integer |i n2 - j n1| so the
  // maximum is exact.
  std::int64_t best = 0;
  std::int64_t i = 0;
  std::int64_t j = 0;
  while (i < n1 || j < n2) {
    double v;
    if (j >= n2 || (i < n1 && x[i] <= y[j])) v = x[i];
    else v = y[j];
    while (i < n1 && x[i] <= v) ++i;
    while (j < n2 && y[j] <= v) ++j;
    best = std::max(best, std::abs(i * n2 - j * n1));
  }

  KsResult r;
  r.n1 = x.size();
  r.n2 = y.size();
  r.d_stat = static_cast<double>(best) / (static_cast<double>(n1) * static_cast<double>(n2));
  r.p_value = ks_pvalue(r.d_stat, r.n1, r.n2);
  return r;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });

  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 hold 1-based ranks start+1..end
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

std::optional<double> spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "spearman inputs differ in length");
  if (x.size() < 2) throw Error(ErrorKind::TooFewPoints, "spearman needs at least two points");

  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace rantail
