#pragma once

// Standard normal density and distribution function in log form, accurate
// deep into both tails.

namespace rapidtail::normal {

inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178032973640562;
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double log_pdf(double x);
double pdf(double x);

/// log Phi(x). Relative accuracy near machine precision for |x| <= 38 via
/// erfc; an asymptotic series takes over in the far lower tail, so the
/// result stays finite for any finite x.
double log_cdf(double x);

/// log(1 - Phi(x)) = log_cdf(-x).
double log_sf(double x);

double cdf(double x);
double sf(double x);

}  // namespace rapidtail::normal
