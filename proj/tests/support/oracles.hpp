#pragma once

// Reference values computed without the library: Boost.Math special
// functions and Boost quadrature applied to densities written out by hand.

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/skew_normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double normal_pdf(double x) { return boost::math::pdf(boost::math::normal(), x); }
inline double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }
inline double normal_sf(double x) {
  return boost::math::cdf(boost::math::complement(boost::math::normal(), x));
}
inline double normal_upper_quantile(double tail) {
  return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

// Standard skew-normal with shape alpha: 2 phi(x) Phi(alpha x).
inline double skew_normal_pdf(double x, double alpha) {
  return boost::math::pdf(boost::math::skew_normal(0.0, 1.0, alpha), x);
}
inline double skew_normal_cdf(double x, double alpha) {
  return boost::math::cdf(boost::math::skew_normal(0.0, 1.0, alpha), x);
}
inline double skew_normal_sf(double x, double alpha) {
  return boost::math::cdf(boost::math::complement(boost::math::skew_normal(0.0, 1.0, alpha), x));
}

// Marginal shape of a unit-variance skew-normal margin with skewness delta.
inline double marginal_shape(double delta) { return delta / std::sqrt(1.0 - delta * delta); }

// Bivariate skew-normal, unit variances, correlation rho, skewness (d1, d2):
// 2 phi_2(y; Sigma) Phi(theta . y).
struct SkewBivariate {
  double rho, d1, d2;
  double th1 = 0.0, th2 = 0.0;

  SkewBivariate(double rho_, double d1_, double d2_) : rho(rho_), d1(d1_), d2(d2_) {
    const double det = 1.0 - rho * rho;
    const double v1 = (d1 - rho * d2) / det;  // delta Sigma^{-1}
    const double v2 = (d2 - rho * d1) / det;
    const double s = std::sqrt(1.0 - (v1 * d1 + v2 * d2));
    th1 = v1 / s;
    th2 = v2 / s;
  }

  double pdf(double y1, double y2) const {
    const double det = 1.0 - rho * rho;
    const double q = (y1 * y1 - 2.0 * rho * y1 * y2 + y2 * y2) / det;
    return 2.0 * std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det)) * normal_cdf(th1 * y1 + th2 * y2);
  }

  // P(Y1 > a1, Y2 > a2) by nested exp-sinh quadrature.
  double survival(double a1, double a2) const {
    boost::math::quadrature::exp_sinh<double> outer, inner;
    auto f = [&](double y1) {
      auto g = [&](double y2) { return pdf(y1, y2); };
      return inner.integrate(g, a2, std::numeric_limits<double>::infinity(), 1e-13);
    };
    return outer.integrate(f, a1, std::numeric_limits<double>::infinity(), 1e-11);
  }
};

}  // namespace oracle
