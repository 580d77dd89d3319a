#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rantail/error.hpp"
#include "rantail/format.hpp"
#include "rantail/stats.hpp"

using namespace rantail;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected rantail::Error";
  return ErrorKind::Io;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::lognormal_distribution<double> d(2.5, 0.7);
  std::vector<double> v(n);
  for (auto& e : v) e = d(rng);
  return v;
}

}  // namespace

TEST(Percentile, Examples) {
  EXPECT_DOUBLE_EQ(percentile(std::vector<double>{5}, 0.95), 5.0);
  EXPECT_DOUBLE_EQ(percentile(std::vector<double>{1, 2, 3}, 0.5), 2.0);
  // h = 3.85 by hand
  EXPECT_DOUBLE_EQ(percentile(std::vector<double>{10, 20, 30, 40}, 0.95), 38.5);
  EXPECT_DOUBLE_EQ(percentile(std::vector<double>{40, 10, 30, 20}, 0.0), 10.0);
  EXPECT_DOUBLE_EQ(percentile(std::vector<double>{40, 10, 30, 20}, 1.0), 40.0);
}

TEST(Percentile, Errors) {
  EXPECT_EQ(kind_of([] { percentile(std::vector<double>{}, 0.5); }), ErrorKind::EmptySequence);
  EXPECT_EQ(kind_of([] { percentile(std::vector<double>{1.0}, 1.5); }), ErrorKind::InvalidSpec);
}

TEST(Percentile, MatchesOracleMonotoneAndBounded) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  std::uniform_real_distribution<double> level(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto v = random_vector(rng, len(rng));
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double prev = -INFINITY;
    std::vector<double> qs{0.0, 0.25, 0.5, 0.95, 1.0};
    for (int k = 0; k < 5; ++k) qs.push_back(level(rng));
    std::sort(qs.begin(), qs.end());
    for (double q : qs) {
      const double p = percentile(v, q);
      EXPECT_NEAR(p, oracle::percentile(v, q), 1e-12);
      EXPECT_GE(p, prev);
      EXPECT_GE(p, *lo);
      EXPECT_LE(p, *hi);
      prev = p;
    }
  }
}

TEST(Exceedance, ExamplesAndStrictness) {
  EXPECT_DOUBLE_EQ(exceedance_prob(std::vector<double>(10, 10.0), 100.0), 0.0);
  EXPECT_DOUBLE_EQ(exceedance_prob(std::vector<double>{50, 150, 2000}, 100.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(exceedance_prob(std::vector<double>{100, 100}, 100.0), 0.0);
  EXPECT_EQ(fmt_rate(exceedance_prob(std::vector<double>{12, 15, 9}, 100.0)), "0.000");
  EXPECT_EQ(kind_of([] { exceedance_prob(std::vector<double>{}, 1.0); }), ErrorKind::EmptySequence);
}

TEST(Exceedance, NonIncreasingInThreshold) {
  std::mt19937_64 rng(5);
  const auto v = random_vector(rng, 500);
  double prev = 1.0;
  for (double t = 0.0; t < 200.0; t += 0.5) {
    const double e = exceedance_prob(v, t);
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(Summary, ConstantAndOutliers) {
  const std::vector<double> c(17, 12.5);
  const auto s = summary_stats(c, 1000.0);
  EXPECT_EQ(s.n, 17u);
  EXPECT_DOUBLE_EQ(s.median_ms, 12.5);
  EXPECT_DOUBLE_EQ(s.p95_ms, 12.5);
  EXPECT_DOUBLE_EQ(s.mean_ms, 12.5);
  EXPECT_DOUBLE_EQ(s.exceed_100ms, 0.0);
  EXPECT_DOUBLE_EQ(s.exceed_1s, 0.0);
  EXPECT_DOUBLE_EQ(s.outlier_rate, 0.0);

  std::vector<double> v(19, 10.0);
  v.push_back(2000.0);
  const auto t = summary_stats(v, 1000.0);
  EXPECT_DOUBLE_EQ(t.outlier_rate, 0.05);
  EXPECT_LE(t.median_ms, t.p95_ms);
  EXPECT_LE(t.exceed_1s, t.exceed_100ms);
  EXPECT_DOUBLE_EQ(t.mean_ms, (19 * 10.0 + 2000.0) / 20.0);
}

TEST(Ks, Examples) {
  const std::vector<double> a{1, 3};
  const std::vector<double> b{2, 4};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).d_stat, 0.5);

  const std::vector<double> same{3, 1, 4, 1, 5, 9, 2, 6};
  const auto r = ks_two_sample(same, same);
  EXPECT_EQ(r.d_stat, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.n1, 8u);

  EXPECT_EQ(kind_of([&] { ks_two_sample(std::vector<double>{}, b); }), ErrorKind::EmptySequence);
}

TEST(Ks, LargeSampleStrongSeparationUnderflows) {
  EXPECT_LT(ks_pvalue(0.888, 8945, 8957), 1e-300);
  EXPECT_LT(ks_pvalue(0.985, 8945, 8630), 1e-300);
  EXPECT_EQ(fmt_pvalue(ks_pvalue(0.888, 8945, 8957)), "0.00e+00");
}

TEST(Ks, PValueKnownValues) {
  // Q(lambda) at lambda = 1.0 and 0.5 from the series definition.
  const auto q = [](double lambda) {
    double s = 0.0;
    for (int k = 1; k < 200; ++k) s += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return s;
  };
  // Choose n1 = n2 = 200 -> ne = 100, sqrt = 10, factor = 10.131.
  const double factor = 10.0 + 0.12 + 0.011;
  EXPECT_NEAR(ks_pvalue(1.0 / factor, 200, 200), q(1.0), 1e-12);
  EXPECT_NEAR(ks_pvalue(0.5 / factor, 200, 200), q(0.5), 1e-12);
  EXPECT_NEAR(q(1.0), 0.26999967167735456, 1e-12);
  EXPECT_DOUBLE_EQ(ks_pvalue(1e-6, 10, 10), 1.0);
}

TEST(Ks, MatchesOracleSymmetricAndDisjoint) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(1, 25);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::tied_vector(rng, len(rng), 12);
    const auto b = oracle::tied_vector(rng, len(rng), 12);
    const auto ab = ks_two_sample(a, b);
    const auto ba = ks_two_sample(b, a);
    EXPECT_NEAR(ab.d_stat, oracle::ks_d(a, b), 1e-12);
    EXPECT_EQ(ab.d_stat, ba.d_stat);
    EXPECT_EQ(ab.p_value, ba.p_value);
    EXPECT_GE(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);

    const bool disjoint = *std::max_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end()) ||
                          *std::max_element(b.begin(), b.end()) < *std::min_element(a.begin(), a.end());
    EXPECT_EQ(ab.d_stat == 1.0, disjoint);
  }
}

TEST(Ks, SameDiscreteDistributionLargeN) {
  std::mt19937_64 rng(2024);
  const auto a = oracle::tied_vector(rng, 10000, 20);
  const auto b = oracle::tied_vector(rng, 10000, 20);
  EXPECT_LT(ks_two_sample(a, b).d_stat, 0.05);
}

TEST(Spearman, Examples) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_DOUBLE_EQ(*spearman_rho(x, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(*spearman_rho(x, std::vector<double>{30, 20, 10}), -1.0);
  EXPECT_FALSE(spearman_rho(x, std::vector<double>{9, 9, 9}).has_value());
  EXPECT_EQ(fmt_rho(spearman_rho(x, std::vector<double>{9, 9, 9})), "N/A");
  EXPECT_EQ(kind_of([&] { spearman_rho(x, std::vector<double>{1, 2}); }), ErrorKind::LengthMismatch);
  EXPECT_EQ(kind_of([] { spearman_rho(std::vector<double>{1}, std::vector<double>{1}); }),
            ErrorKind::TooFewPoints);
}

TEST(Spearman, AverageRanks) {
  const auto r = average_ranks(std::vector<double>{10, 20, 20, 5});
  EXPECT_EQ(r, (std::vector<double>{2.0, 3.5, 3.5, 1.0}));
}

TEST(Spearman, MatchesOracleAndIsRankInvariant) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(2, 40);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = len(rng);
    const auto x = oracle::tied_vector(rng, n, 6);
    const auto y = oracle::tied_vector(rng, n, 6);
    const auto got = spearman_rho(x, y);
    const auto want = oracle::spearman(x, y);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (!got) continue;
    EXPECT_NEAR(*got, *want, 1e-12);

    std::vector<double> fx(x.size());
    std::transform(x.begin(), x.end(), fx.begin(), [](double v) { return std::exp(v) * 3.0 + 1.0; });
    EXPECT_NEAR(*spearman_rho(fx, y), *got, 1e-12);
  }
}
