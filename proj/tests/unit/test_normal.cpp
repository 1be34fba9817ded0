#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rapidtail/normal.hpp"

namespace rt = rapidtail::normal;

namespace {

long double ref_log_cdf(long double x) {
  return std::log(boost::math::cdf(boost::math::normal_distribution<long double>(), x));
}

// Asymptotic Mills series for x <= -40, where the truncation error is below 1e-16.
long double series_log_cdf(long double x) {
  const long double z = 1.0L / (x * x);
  const long double s = 1 - z + 3 * z * z - 15 * z * z * z + 105 * z * z * z * z - 945 * z * z * z * z * z;
  return -0.5L * x * x - 0.5L * std::log(2 * 3.14159265358979323846264338327950288L) - std::log(-x) +
         std::log(s);
}

}  // namespace

TEST(Normal, LogCdfMatchesLongDoubleReference) {
  for (double x : {-38.0, -30.5, -25.0, -8.0, -1.0, 0.0, 0.3, 2.0, 6.0}) {
    const double ref = static_cast<double>(ref_log_cdf(x));
    EXPECT_NEAR(rt::log_cdf(x), ref, 1e-13 * std::max(1.0, std::abs(ref))) << "x=" << x;
  }
}

TEST(Normal, LogCdfFarTailHasNoUnderflow) {
  for (double x : {-40.0, -60.0, -200.0, -1e4}) {
    const double ref = static_cast<double>(series_log_cdf(x));
    EXPECT_TRUE(std::isfinite(rt::log_cdf(x)));
    EXPECT_NEAR(rt::log_cdf(x) / ref, 1.0, 1e-13) << "x=" << x;
  }
}

TEST(Normal, SurvivalIsReflectedCdf) {
  for (double x : {-3.0, 0.0, 1.5, 8.0, 30.0}) {
    EXPECT_DOUBLE_EQ(rt::log_sf(x), rt::log_cdf(-x));
    // exp of an argument near -x^2/2 carries relative error ~ eps * x^2 / 2.
    EXPECT_NEAR(rt::sf(x) / oracle::normal_sf(x), 1.0, 1e-13 * std::max(1.0, 0.5 * x * x / 100.0));
  }
}

TEST(Normal, DensityAtOrigin) {
  EXPECT_NEAR(rt::log_pdf(0.0), -0.5 * std::log(2.0 * oracle::kPi), 1e-15);
  EXPECT_NEAR(rt::pdf(1.7), oracle::normal_pdf(1.7), 1e-16);
  EXPECT_DOUBLE_EQ(rt::cdf(0.0), 0.5);
}
