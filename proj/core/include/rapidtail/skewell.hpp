#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "rapidtail/generators.hpp"

namespace rapidtail {

/// Skew-elliptical law SE_d(mu, Sigma, g_{d+1}, delta): the law of X given
/// X0 > 0 for (X0, X) elliptical with location (0, mu), generator g_{d+1} and
/// dispersion [[1, delta], [delta^T, Sigma]].
///
/// Built only through build_spec, which validates the parameters and fills the
/// derived quantities. Immutable; safe to share across threads.
class SkewEllipticalSpec {
 public:
  int dim() const noexcept { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }
  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  const Eigen::VectorXd& delta() const noexcept { return delta_; }
  const DensityGenerator& generator() const noexcept { return generator_; }

  const Eigen::MatrixXd& sigma_inv() const noexcept { return sigma_inv_; }
  double log_det_sigma() const noexcept { return log_det_sigma_; }
  /// theta = delta Sigma^{-1} / (1 - delta Sigma^{-1} delta^T)^{1/2}.
  const Eigen::VectorXd& theta() const noexcept { return theta_; }
  /// Per-margin skewness of the standardized pair (X0, X_i / sqrt(Sigma_ii));
  /// delta_i / (1 - delta_i^2)^{1/2} when Sigma_ii = 1.
  const Eigen::VectorXd& theta_bar() const noexcept { return theta_bar_; }
  /// kappa_U = 1 Sigma^{-1} 1^T.
  double kappa_u() const noexcept { return kappa_u_; }
  /// Sigma^{-1} 1^T, the rate vector of the tail density.
  const Eigen::VectorXd& rate() const noexcept { return rate_; }
  /// 1 theta^T.
  double theta_sum() const noexcept { return theta_.sum(); }

  /// Generator g_2 of each standardized pair (X0, X_i), obtained from
  /// g_{d+1} by d - 1 dimension reductions.
  const DensityGenerator& marginal_generator() const noexcept { return marginal_generator_; }

  bool is_normal() const noexcept {
    return generator_.family() == GeneratorFamily::builtin_normal;
  }

 private:
  friend SkewEllipticalSpec build_spec(Eigen::VectorXd, Eigen::MatrixXd, Eigen::VectorXd,
                                       DensityGenerator);
  SkewEllipticalSpec(DensityGenerator gen, DensityGenerator marginal)
      : generator_(std::move(gen)), marginal_generator_(std::move(marginal)) {}

  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd delta_;
  DensityGenerator generator_;
  DensityGenerator marginal_generator_;
  Eigen::MatrixXd sigma_inv_;
  double log_det_sigma_ = 0.0;
  Eigen::VectorXd theta_;
  Eigen::VectorXd theta_bar_;
  Eigen::VectorXd rate_;
  double kappa_u_ = 0.0;
};

/// Validates and assembles a spec.
///  - ShapeError: generator.dim() != d + 1 or vector/matrix sizes disagree.
///  - InvalidDispersion: Sigma not symmetric positive-definite
///    (smallest eigenvalue <= 1e-12 |Sigma|).
///  - InvalidSkewness: delta Sigma^{-1} delta^T >= 1 - 1e-12.
SkewEllipticalSpec build_spec(Eigen::VectorXd mu, Eigen::MatrixXd sigma, Eigen::VectorXd delta,
                              DensityGenerator generator);

/// Convenience: d = 2, unit variances, correlation rho, normal generator.
SkewEllipticalSpec make_bivariate_skew_normal(double rho, double delta1, double delta2);

/// log of int_{-inf}^{b} g(r^2 + q) dr, closed form for the builtin normal
/// family and log-domain quadrature otherwise.
double log_conditional_integral(const DensityGenerator& gen, double b, double q);

/// log f_Y(y) = log[2 |Sigma|^{-1/2} int_{-inf}^{(y-mu) theta^T} g_{d+1}(r^2 + q(y)) dr].
double log_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& y);

/// log f_{Y_i}(t) for the i-th (zero-based) margin.
double marginal_log_density(const SkewEllipticalSpec& spec, int i, double t);

struct Sample {
  Eigen::MatrixXd draws;  // n x d
  std::uint64_t proposals = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(draws.rows()) / static_cast<double>(proposals);
  }
};

/// n draws by rejection: (X0, X) ~ N((0, mu), Sigma*) via a Cholesky factor
/// of Sigma*, keeping X whenever X0 > 0. Deterministic for a given seed; the
/// RNG stream is owned by the call. Builtin normal generator only
/// (PreconditionError otherwise); InvalidSpec when Sigma* is not PD.
Sample sample(const SkewEllipticalSpec& spec, std::size_t n, std::uint64_t seed);

enum class TailCondition {
  all_nonnegative,     // every theta_bar_i >= 0
  equal_negative,      // theta_bar_1 = ... = theta_bar_d < 0
  not_equivalent
};

std::string_view to_string(TailCondition c);

struct TailEquivalenceProfile {
  /// a_i = lim f_i(mu_i + t) / f_1(mu_1 + t); a_0 = 1. Empty when the
  /// margins are not right-tail equivalent.
  Eigen::VectorXd a;
  TailCondition condition = TailCondition::not_equivalent;
  bool equivalent() const noexcept { return condition != TailCondition::not_equivalent; }
};

/// Classifies the skewness signs and returns the tail-equivalence constants:
/// from the closed-form table for the builtin normal generator, numerically
/// (Aitken at t = 10, 20, 40) otherwise. Margins with unequal dispersion
/// diagonals are never tail equivalent.
TailEquivalenceProfile tail_equivalence_profile(const SkewEllipticalSpec& spec);

/// Numerical tail constants for any generator: Aitken-extrapolated
/// f_i(mu_i + t) / f_1(mu_1 + t) over `t_grid` (at least three probes).
Eigen::VectorXd numeric_tail_constants(const SkewEllipticalSpec& spec,
                                       std::span<const double> t_grid);

/// Absolute tolerance used when testing theta_bar_i or 1 theta^T against 0.
inline constexpr double kZeroTolerance = 1e-12;

}  // namespace rapidtail
