#include <gtest/gtest.h>

#include <regen/intersectlaw.hpp>

#include "oracles.hpp"

using namespace regen;
using namespace regen::intersectlaw;

TEST(IntersectionCdf, MatchesHypergeometricForm) {
  for (auto [b1, b2] : {std::pair{0.75, 0.75}, std::pair{0.6, 0.9}, std::pair{0.9, 0.3}, std::pair{0.55, 0.55}})
    for (double a : {0.5, 1.0, 2.0})
      for (double x : {0.05, 0.3, 1.0, 4.0})
        EXPECT_NEAR(intersection_cdf(x, a, b1, b2), oracle::intersection_cdf(x, a, b1, b2), 1e-9)
            << b1 << " " << b2 << " a=" << a << " x=" << x;
}

TEST(IntersectionCdf, MonotoneWithLimits) {
  double prev = 0.0;
  for (double x = 1e-4; x < 1e4; x *= 1.7) {
    const double c = intersection_cdf(x, 1.0, 0.75, 0.75);
    EXPECT_GE(c, prev - 1e-12);
    prev = c;
  }
  // Near zero the CDF decays like x^(1-beta1).
  EXPECT_NEAR(intersection_cdf(1e-12, 1.0, 0.75, 0.75), oracle::intersection_cdf(1e-12, 1.0, 0.75, 0.75), 1e-12);
  EXPECT_LT(intersection_cdf(1e-40, 1.0, 0.75, 0.75), 1e-6);
  EXPECT_NEAR(intersection_cdf(1e300, 1.0, 0.75, 0.75), 1.0, 1e-10);
  // Algebraic approach to 1: at x = 1e6 the gap is still about 4e-4.
  EXPECT_NEAR(intersection_cdf(1e6, 1.0, 0.75, 0.75), 1.0, 1e-3);
}

TEST(IntersectionCdf, DependsOnXOverAOnly) {
  EXPECT_NEAR(intersection_cdf(2.0, 1.0, 0.7, 0.8), intersection_cdf(6.0, 3.0, 0.7, 0.8), 1e-12);
}

TEST(IntersectionCdf, Validation) {
  EXPECT_THROW(intersection_cdf(1.0, 1.0, 0.4, 0.5), NonIntersectingRegime);
  EXPECT_THROW(intersection_cdf(-1.0, 1.0, 0.7, 0.7), ValidationError);
  EXPECT_THROW(intersection_cdf(1.0, 0.0, 0.7, 0.7), ValidationError);
  EXPECT_THROW(intersection_cdf(1.0, 1.0, 0.7, 0.7, {0.0, 10}), ValidationError);
}

TEST(Recursion, ResidualVanishes) {
  const QuadratureConfig cfg{1e-10, 15};
  for (auto [b1, b2] : {std::pair{0.75, 0.75}, std::pair{0.6, 0.9}})
    for (double x : {0.1, 1.0, 10.0}) EXPECT_LT(recursion_residual(x, b1, b2, cfg), 1e-8) << b1 << " " << b2 << " " << x;
}

TEST(BetaStar, AndEllBeta) {
  const double two[] = {0.75, 0.75}, three[] = {0.9, 0.8, 0.7};
  EXPECT_DOUBLE_EQ(beta_star(two), 0.5);
  EXPECT_NEAR(beta_star(three), 0.4, 1e-15);
  // ell_beta = max{l : l < 1/(1-beta)}
  EXPECT_EQ(ell_beta(0.3), 1);
  EXPECT_EQ(ell_beta(0.5), 1);
  EXPECT_EQ(ell_beta(0.6), 2);
  EXPECT_EQ(ell_beta(0.7), 3);
  EXPECT_EQ(ell_beta(0.75), 3);
  EXPECT_EQ(ell_beta(0.8), 4);
  EXPECT_EQ(ell_beta(0.95), 19);
  EXPECT_THROW(ell_beta(1.0), ValidationError);
}

TEST(ShiftLaw, ClosedFormProperties) {
  const double b[] = {0.8, 0.8};
  // x^(1-b*) times a constant; check the power and the constant.
  const double bs = 0.6;
  const double k = std::exp(2 * (std::lgamma(0.8) + std::lgamma(1.2)) - std::lgamma(bs) - std::lgamma(2 - bs));
  for (double x : {0.0, 0.1, 0.5, 1.0}) EXPECT_NEAR(shift_cdf_V(x, b), k * std::pow(x, 1 - bs), 1e-14);
  const double bad[] = {0.5, 0.5};
  EXPECT_THROW(shift_cdf_V(0.5, bad), NonIntersectingRegime);
  EXPECT_THROW(shift_cdf_V(1.5, b), ValidationError);
}
