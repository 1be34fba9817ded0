#pragma once

#include "rapidtail/skewell.hpp"

// Univariate tail machinery. Distribution functions (log_survival, log_cdf,
// quantile) take points in the original coordinates. Tail-scaling functions
// (reciprocal_hazard, CanonicalScaling) take t measured from the location, so
// t stands for mu_1 + t on margin 1.

namespace rapidtail {

/// log P(Y_i > t), by log-domain quadrature of the marginal density.
double log_survival(const SkewEllipticalSpec& spec, int i, double t);

/// log P(Y_i <= t).
double log_cdf(const SkewEllipticalSpec& spec, int i, double t);

/// m(t) = P(Y_1 > mu_1 + t) / f_1(mu_1 + t); requires t >= 1.
double reciprocal_hazard(const SkewEllipticalSpec& spec, double t);

enum class ThetaCase { nonzero_sum, zero_sum };

std::string_view to_string(ThetaCase c);

/// The scaling pair (m, V) fixed by the constructive choice
///   V(t) = m(t)^{d/kappa} G(t)^{1/kappa},
///   G(t) = int_{-inf}^{t 1theta^T} g_{d+1}(r^2 + t^2 kappa) dr   if 1theta^T != 0,
///   G(t) = g_d(t^2 kappa)                                        if 1theta^T == 0,
/// with m the reciprocal hazard of margin 1. V is unique only up to a
/// constant; every limit in the library is stated against this one.
///
/// Holds its own copy of the spec, so a scaling can never be paired with a
/// different distribution.
class CanonicalScaling {
 public:
  const SkewEllipticalSpec& spec() const noexcept { return spec_; }
  double kappa() const noexcept { return spec_.kappa_u(); }
  ThetaCase theta_case() const noexcept { return case_; }

  double m(double t) const { return reciprocal_hazard(spec_, t); }
  double log_g_term(double t) const;
  /// log V(t).
  double log_v(double t) const;
  /// log [m(t)^{-d} V(t)^{kappa}], the normalizer of the tail density ratio.
  double log_density_normalizer(double t) const;
  /// log V(t)^{kappa}, the normalizer of the joint survival ratio.
  double log_survival_normalizer(double t) const { return kappa() * log_v(t); }

 private:
  friend CanonicalScaling build_scaling(const SkewEllipticalSpec&);
  CanonicalScaling(SkewEllipticalSpec spec, ThetaCase c, DensityGenerator reduced)
      : spec_(std::move(spec)), case_(c), reduced_(std::move(reduced)) {}

  SkewEllipticalSpec spec_;
  ThetaCase case_;
  DensityGenerator reduced_;  // g_d, used by the zero-sum branch
};

/// PreconditionError when the margins are not right-tail equivalent.
CanonicalScaling build_scaling(const SkewEllipticalSpec& spec);

/// t with F_i(t) = u, to |F_i(t) - u| < 1e-13 min(u, 1 - u) where the
/// quadrature allows. Bracketing on mu_i + sqrt(Sigma_ii) [-60, 60]
/// (RangeError outside) then safeguarded Newton on the log scale.
double quantile(const SkewEllipticalSpec& spec, int i, double u);

/// t with P(Y_i > t) = tail, for tail in (0, 1); avoids forming 1 - tail.
double upper_quantile(const SkewEllipticalSpec& spec, int i, double tail);

}  // namespace rapidtail
