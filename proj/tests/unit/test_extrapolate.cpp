#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rapidtail/errors.hpp"
#include "rapidtail/extrapolate.hpp"

using namespace rapidtail;

TEST(Aitken, InverseSquareSequence) {
  const std::vector<double> v = {1 + 1.0 / 9, 1 + 1.0 / 16, 1 + 1.0 / 25};
  // Delta-squared by hand: c - (c - b)^2 / (c - 2b + a).
  const double a = v[0], b = v[1], c = v[2];
  const double expected = c - (c - b) * (c - b) / (c - 2 * b + a);
  EXPECT_NEAR(aitken_extrapolate(v).value, expected, 1e-14);
  // A 1/t^2 sequence is not geometric, so the limit is only improved, not recovered.
  EXPECT_NEAR(aitken_extrapolate(v).value, 1.0, 2.1e-2);
  EXPECT_LT(std::abs(aitken_extrapolate(v).value - 1.0), c - 1.0);
}

TEST(Aitken, ConstantSequenceIsDegenerate) {
  const std::vector<double> v = {2.5, 2.5, 2.5};
  const auto r = aitken_extrapolate(v);
  EXPECT_EQ(r.value, 2.5);
  EXPECT_TRUE(r.degenerate);
}

TEST(Aitken, GeometricApproachIsExact) {
  const std::vector<double> v = {1.5, 1.25, 1.125};
  const auto r = aitken_extrapolate(v);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_FALSE(r.degenerate);
}

TEST(Aitken, NeedsThreeTerms) {
  const std::vector<double> v = {1.0, 2.0};
  EXPECT_THROW(aitken_extrapolate(v), DomainError);
}

TEST(GridAitken, RecoversPowerLawOnIrregularGrid) {
  const std::vector<double> t = {3, 4, 5, 6, 8};
  for (double p : {0.5, 1.0, 2.0, 3.5}) {
    std::vector<double> v;
    for (double x : t) v.push_back(0.7 - 1.3 * std::pow(x, -p));
    const auto r = aitken_extrapolate(t, v);
    EXPECT_NEAR(r.value, 0.7, 1e-10) << "p=" << p;
    EXPECT_NEAR(r.exponent, p, 1e-6);
  }
}

TEST(GridAitken, MatchesClassicOnGeometricGrid) {
  const std::vector<double> t = {10, 20, 40};
  const std::vector<double> v = {1.1, 0.97, 0.93};
  EXPECT_NEAR(aitken_extrapolate(t, v).value, aitken_extrapolate(v).value, 1e-12);
}

TEST(GridAitken, ConstantTailIsDegenerate) {
  const std::vector<double> t = {10, 20, 40};
  const std::vector<double> v = {0.5, 0.5, 0.5};
  const auto r = aitken_extrapolate(t, v);
  EXPECT_EQ(r.value, 0.5);
  EXPECT_TRUE(r.degenerate);
}

TEST(Richardson, ExactForPolynomialInH) {
  const std::vector<double> h = {0.1, 0.0625, 0.04, 0.0277};
  std::vector<double> v;
  for (double x : h) v.push_back(2.0 + 3.0 * x - 5.0 * x * x + x * x * x);
  EXPECT_NEAR(richardson_extrapolate(h, v).value, 2.0, 1e-12);
}

TEST(Richardson, RejectsRepeatedAbscissae) {
  const std::vector<double> h = {0.1, 0.1, 0.05};
  const std::vector<double> v = {1.0, 1.0, 1.0};
  EXPECT_THROW(richardson_extrapolate(h, v), DomainError);
}
