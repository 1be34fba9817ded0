#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rapidtail/errors.hpp"
#include "rapidtail/quadrature.hpp"

using namespace rapidtail;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(Quadrature, GaussianOverWholeLine) {
  const auto r = quad::log_integrate([](double x) { return -0.5 * x * x; }, -kInf, kInf);
  EXPECT_NEAR(r.log_value, 0.5 * std::log(2.0 * oracle::kPi), 1e-12);
  EXPECT_LT(r.rel_error, 1e-10);
}

TEST(Quadrature, HalfLinesInBothDirections) {
  auto f = [](double x) { return -std::abs(x); };
  EXPECT_NEAR(quad::log_integrate(f, 0.0, kInf).log_value, 0.0, 1e-12);
  EXPECT_NEAR(quad::log_integrate(f, -kInf, 0.0).log_value, 0.0, 1e-12);
}

TEST(Quadrature, FiniteRangePolynomial) {
  // int_0^2 x^3 dx = 4
  const auto r = quad::log_integrate([](double x) { return 3.0 * std::log(x); }, 0.0, 2.0);
  EXPECT_NEAR(r.log_value, std::log(4.0), 1e-12);
}

TEST(Quadrature, ValuesOutsideDoubleRange) {
  // exp(1000 - x) on [0, inf) and exp(-1e4 - x) on [0, inf).
  EXPECT_NEAR(quad::log_integrate([](double x) { return 1000.0 - x; }, 0.0, kInf).log_value, 1000.0,
              1e-9);
  EXPECT_NEAR(quad::log_integrate([](double x) { return -1e4 - x; }, 0.0, kInf).log_value, -1e4,
              1e-9);
}

TEST(Quadrature, FarTailOfGaussian) {
  // log int_40^inf phi = log of the normal survival at 40.
  const double ref = std::log(oracle::normal_sf(20.0));
  const auto r = quad::log_integrate(
      [](double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * oracle::kPi); }, 20.0, kInf);
  EXPECT_NEAR(r.log_value / ref, 1.0, 1e-12);
}

TEST(Quadrature, NanIntegrandThrows) {
  EXPECT_THROW(quad::log_integrate([](double) { return std::nan(""); }, 0.0, 1.0), NumericFailure);
}

TEST(Quadrature, EmptyAndReversedRanges) {
  EXPECT_EQ(quad::log_integrate([](double) { return 0.0; }, 1.0, 1.0).log_value, -kInf);
  EXPECT_THROW(quad::log_integrate([](double) { return 0.0; }, 2.0, 1.0), DomainError);
}

TEST(Quadrature, LogSumAndDifference) {
  EXPECT_NEAR(quad::log_sum_exp(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
  EXPECT_EQ(quad::log_sum_exp(-kInf, 1.5), 1.5);
  const std::vector<double> xs = {1000.0, 1000.0, 1000.0};
  EXPECT_NEAR(quad::log_sum_exp(xs), 1000.0 + std::log(3.0), 1e-12);
  EXPECT_NEAR(quad::log_diff_exp(std::log(5.0), std::log(3.0)), std::log(2.0), 1e-15);
  EXPECT_EQ(quad::log_diff_exp(2.0, 2.0), -kInf);
  EXPECT_THROW(quad::log_diff_exp(1.0, 2.0), DomainError);
}
