#include "rapidtail/normal.hpp"

#include <cmath>

namespace rapidtail::normal {
namespace {

constexpr double kInvSqrtTwo = 0.70710678118654752440084436210485;

// Below this point erfc(-x/sqrt 2) approaches the subnormal range.
constexpr double kSeriesThreshold = -30.0;

// log Phi(x) for x << 0 from the Mills-ratio series
//   Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
double log_cdf_asymptotic(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double next = -term * (2.0 * k - 1.0) * inv_x2;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return log_pdf(x) - std::log(-x) + std::log(sum);
}

}  // namespace

double log_pdf(double x) { return -0.5 * x * x - kLogSqrtTwoPi; }

double pdf(double x) { return std::exp(log_pdf(x)); }

double log_cdf(double x) {
  if (x < kSeriesThreshold) return log_cdf_asymptotic(x);
  if (x < 0.0) return std::log(0.5 * std::erfc(-x * kInvSqrtTwo));
  return std::log1p(-0.5 * std::erfc(x * kInvSqrtTwo));
}

double log_sf(double x) { return log_cdf(-x); }

double cdf(double x) {
  if (x < 0.0) return 0.5 * std::erfc(-x * kInvSqrtTwo);
  return 1.0 - 0.5 * std::erfc(x * kInvSqrtTwo);
}

double sf(double x) { return cdf(-x); }

}  // namespace rapidtail::normal
