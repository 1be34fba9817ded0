#pragma once

#include <functional>
#include <limits>
#include <span>

namespace rapidtail::quad {

/// Integrand given by its natural logarithm; -inf denotes a zero value.
using LogIntegrand = std::function<double(double)>;

struct Options {
  double rel_tol = 1e-10;
  int max_panels = 2000;
  /// Length scale of the map x = lo + scale * u / (1 - u) used on infinite
  /// ranges. Zero selects the decay length of the integrand at the finite end.
  double scale = 0.0;
  /// Split point for integrals over the whole real line.
  double center = 0.0;
};

struct LogIntegral {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_error = 0.0;
  int evaluations = 0;
};

/// log of the integral of exp(log_f) over [lo, hi]; either bound may be
/// infinite. Adaptive global subdivision with the 15-point Gauss-Kronrod
/// rule. Panel sums are held relative to a running reference exponent so the
/// integrand never under- or overflows.
///
/// Throws NumericFailure when the panel budget runs out before the relative
/// tolerance is met, or when the integrand returns NaN / +inf.
LogIntegral log_integrate(const LogIntegrand& log_f, double lo, double hi,
                          const Options& opts = {});

/// Distance from x0 (in the direction of sign(direction)) over which log_f
/// drops by one unit below log_f(x0), found by doubling/halving.
double decay_scale(const LogIntegrand& log_f, double x0, int direction);

double log_sum_exp(double a, double b);
double log_sum_exp(std::span<const double> xs);

/// log(exp(a) - exp(b)) for a >= b.
double log_diff_exp(double a, double b);

}  // namespace rapidtail::quad
