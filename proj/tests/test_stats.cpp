#include <gtest/gtest.h>

#include <regen/parallel.hpp>
#include <regen/stats.hpp>

using namespace regen;
using namespace regen::stats;

TEST(Ecdf, StepValuesAndQuantiles) {
  const auto d = ecdf({3.0, 1.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(d(0.5), 0.0);
  EXPECT_DOUBLE_EQ(d(1.0), 0.25);
  EXPECT_DOUBLE_EQ(d(2.0), 0.75);
  EXPECT_DOUBLE_EQ(d(3.0), 1.0);
  EXPECT_DOUBLE_EQ(d.survival(2.5), 0.25);
  EXPECT_EQ(d.count(), 4u);
  EXPECT_DOUBLE_EQ(median_of({5.0, 1.0, 3.0}), 3.0);
}

TEST(Ks, OneSampleAgainstBruteForce) {
  std::vector<double> s = {0.1, 0.4, 0.45, 0.8};
  const auto d = ecdf(s);
  // Uniform CDF; sup |F_n - F| is attained just before or at a sample point.
  double brute = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    brute = std::max(brute, std::fabs(double(i + 1) / 4.0 - s[i]));
    brute = std::max(brute, std::fabs(double(i) / 4.0 - s[i]));
  }
  EXPECT_NEAR(ks_one_sample(d, [](double x) { return std::clamp(x, 0.0, 1.0); }), brute, 1e-15);
}

TEST(Ks, TwoSampleAgainstBruteForce) {
  const std::vector<double> a = {0.1, 0.5, 0.7, 0.9, 1.3}, b = {0.2, 0.5, 1.1};
  const auto da = ecdf(a), db = ecdf(b);
  double brute = 0.0;
  for (double x : {0.1, 0.2, 0.5, 0.7, 0.9, 1.1, 1.3}) brute = std::max(brute, std::fabs(da(x) - db(x)));
  EXPECT_NEAR(ks_two_sample(da, db), brute, 1e-15);
  EXPECT_DOUBLE_EQ(ks_two_sample(da, da), 0.0);
}

TEST(Ks, CriticalValues) {
  EXPECT_NEAR(ks_critical_constant(0.01), 1.6276, 1e-4);
  EXPECT_NEAR(ks_critical_one_sample(10000), 0.016276, 1e-6);
  EXPECT_NEAR(ks_critical_two_sample(10000, 10000), 1.6276 * std::sqrt(2e-4), 1e-6);
}

TEST(Wilson, KnownValues) {
  // 0 successes out of 100 at z = 1.96: upper limit z^2/(n+z^2).
  const auto i0 = wilson_interval(0, 100, 1.96);
  EXPECT_DOUBLE_EQ(i0.low, 0.0);
  EXPECT_NEAR(i0.high, 1.96 * 1.96 / (100 + 1.96 * 1.96), 1e-12);
  const auto i1 = wilson_interval(50, 100);
  EXPECT_NEAR(0.5 * (i1.low + i1.high), 0.5, 1e-12);
  EXPECT_TRUE(i1.contains(0.5));
  EXPECT_THROW(wilson_interval(3, 2), ValidationError);
}

TEST(TailRatio, CountsStrictExceedances) {
  const auto d = ecdf({1.0, 2.0, 3.0, 4.0});
  const auto t = tail_ratio(d, 2.0, 2.0);
  EXPECT_DOUBLE_EQ(t.estimate, 4.0 * 0.5);
  EXPECT_LE(t.ci_low, t.estimate);
  EXPECT_GE(t.ci_high, t.estimate);
}

TEST(Ols, RecoversExactLine) {
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3.5, 6, 8.5};
  EXPECT_NEAR(ols_slope(x, y), 2.5, 1e-14);
  const std::vector<double> flat = {1, 1};
  EXPECT_THROW(ols_slope(flat, flat), ValidationError);
}

TEST(Parallel, OutputIndependentOfThreadCount) {
  auto f = [](std::size_t r) { return double(r * r) + 0.5; };
  const auto a = run_replicates<double>(10000, 1, f);
  const auto b = run_replicates<double>(10000, 8, f);
  EXPECT_EQ(a, b);
  EXPECT_THROW(run_replicates<double>(100, 4, [](std::size_t r) -> double {
                 if (r == 77) throw ValidationError("boom");
                 return 0.0;
               }),
               ValidationError);
}
