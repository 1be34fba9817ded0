#include "rapidtail/tails1d.hpp"

#include <cmath>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"
#include "rapidtail/normal.hpp"
#include "rapidtail/quadrature.hpp"

namespace rapidtail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_tail_integral(const SkewEllipticalSpec& spec, int i, double t, int direction) {
  if (i < 0 || i >= spec.dim()) throw DomainError(fmt::format("margin index {} out of range", i));
  if (std::isinf(t)) {
    const bool empty = (direction > 0) == (t > 0);
    return empty ? -kInf : 0.0;
  }
  const auto integrand = [&spec, i](double s) { return marginal_log_density(spec, i, s); };
  quad::Options opts;
  opts.rel_tol = 1e-12;
  opts.max_panels = 4000;
  return direction > 0 ? quad::log_integrate(integrand, t, kInf, opts).log_value
                       : quad::log_integrate(integrand, -kInf, t, opts).log_value;
}

// Solves log P(tail side) = log_target for the chosen side. On the upper
// side the log-survival decreases in t with slope -1/m(t); on the lower side
// the log-cdf increases with slope f/F.
double solve_quantile(const SkewEllipticalSpec& spec, int i, double log_target, bool upper) {
  const double center = spec.mu()(i);
  const double scale = std::sqrt(spec.sigma()(i, i));
  double lo = center - 60.0 * scale;
  double hi = center + 60.0 * scale;

  const auto log_side = [&](double t) {
    return upper ? log_tail_integral(spec, i, t, +1) : log_tail_integral(spec, i, t, -1);
  };
  // residual increasing in t
  const auto residual = [&](double t) {
    const double v = log_side(t) - log_target;
    return upper ? -v : v;
  };

  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (!(r_lo <= 0.0 && r_hi >= 0.0)) {
    throw RangeError(fmt::format("quantile of margin {} not bracketed in [{}, {}]", i, lo, hi));
  }

  // Start from the normal approximation of the standardized margin.
  double t = center;
  if (upper) {
    t = center + scale * std::sqrt(std::max(0.0, -2.0 * log_target));
  } else {
    t = center - scale * std::sqrt(std::max(0.0, -2.0 * log_target));
  }
  t = std::clamp(t, lo, hi);

  constexpr double kTol = 1e-13;
  for (int it = 0; it < 100; ++it) {
    const double log_p = log_side(t);
    const double r = upper ? -(log_p - log_target) : log_p - log_target;
    if (std::abs(r) <= kTol) return t;
    if (r < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    // d/dt log side = -f/Fbar (upper) or f/F (lower); residual slope is f/P.
    const double slope = std::exp(marginal_log_density(spec, i, t) - log_p);
    double next = t - r / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      return next;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      return next;
    }
    t = next;
  }
  return t;
}

}  // namespace

double log_survival(const SkewEllipticalSpec& spec, int i, double t) {
  return log_tail_integral(spec, i, t, +1);
}

double log_cdf(const SkewEllipticalSpec& spec, int i, double t) {
  return log_tail_integral(spec, i, t, -1);
}

double reciprocal_hazard(const SkewEllipticalSpec& spec, double t) {
  if (!(t >= 1.0)) throw DomainError(fmt::format("reciprocal_hazard needs t >= 1, got {}", t));
  const double x = spec.mu()(0) + t;
  return std::exp(log_survival(spec, 0, x) - marginal_log_density(spec, 0, x));
}

std::string_view to_string(ThetaCase c) {
  return c == ThetaCase::nonzero_sum ? "theta-sum-nonzero" : "theta-sum-zero";
}

CanonicalScaling build_scaling(const SkewEllipticalSpec& spec) {
  if (!tail_equivalence_profile(spec).equivalent()) {
    throw PreconditionError(
        "margins are not right-tail equivalent: theta_bar components have mixed signs "
        "(or the dispersion diagonal is not constant)");
  }
  const ThetaCase c =
      std::abs(spec.theta_sum()) > kZeroTolerance ? ThetaCase::nonzero_sum : ThetaCase::zero_sum;
  DensityGenerator reduced = spec.is_normal() ? make_normal_generator(spec.dim())
                                              : reduce_dimension(spec.generator());
  return CanonicalScaling(spec, c, std::move(reduced));
}

double CanonicalScaling::log_g_term(double t) const {
  const double q = t * t * spec_.kappa_u();
  if (case_ == ThetaCase::nonzero_sum) {
    return log_conditional_integral(spec_.generator(), t * spec_.theta_sum(), q);
  }
  return reduced_.log_g(q);
}

double CanonicalScaling::log_v(double t) const {
  const double kappa = spec_.kappa_u();
  return (spec_.dim() * std::log(m(t)) + log_g_term(t)) / kappa;
}

double CanonicalScaling::log_density_normalizer(double t) const {
  const double kappa = spec_.kappa_u();
  const double log_m = std::log(m(t));
  const double log_v = (spec_.dim() * log_m + log_g_term(t)) / kappa;
  return -spec_.dim() * log_m + kappa * log_v;
}

double quantile(const SkewEllipticalSpec& spec, int i, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError(fmt::format("quantile needs u in (0, 1), got {}", u));
  if (i < 0 || i >= spec.dim()) throw DomainError(fmt::format("margin index {} out of range", i));
  if (u <= 0.5) return solve_quantile(spec, i, std::log(u), false);
  return solve_quantile(spec, i, std::log1p(-u), true);
}

double upper_quantile(const SkewEllipticalSpec& spec, int i, double tail) {
  if (!(tail > 0.0 && tail < 1.0)) {
    throw DomainError(fmt::format("upper_quantile needs tail in (0, 1), got {}", tail));
  }
  if (i < 0 || i >= spec.dim()) throw DomainError(fmt::format("margin index {} out of range", i));
  if (tail <= 0.5) return solve_quantile(spec, i, std::log(tail), true);
  return solve_quantile(spec, i, std::log1p(-tail), false);
}

}  // namespace rapidtail
