#pragma once

#include <Eigen/Dense>

#include "rapidtail/skewell.hpp"
#include "rapidtail/tailasym.hpp"

// Copula-level tail objects. The slowly varying factor of the copula tail is
// never estimated; finite-u quantities are exposed only as ratios in which it
// cancels in the limit.
namespace rapidtail {

/// log c(u) = log f(F^{-1}(u)) - sum_i log f_i(F_i^{-1}(u_i)).
double log_copula_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& u);
double copula_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& u);

/// log c(1 - tail), with the quantiles taken from the upper tail so small
/// tail probabilities keep full relative precision.
double log_copula_density_upper(const SkewEllipticalSpec& spec, const Eigen::VectorXd& tail);

/// Survival copula C^(u) = P(U > 1 - u), the joint survival at the upper
/// marginal quantiles. A coordinate equal to 1 leaves that margin free.
double survival_copula_value(const SkewEllipticalSpec& spec, const Eigen::VectorXd& u);

/// Closed-form upper tail density and tail dependence function
///   lambda_U(w) = K prod a_i^{-c_i} w_i^{c_i - 1},
///   b_U(w)      = K prod a_i^{-c_i} w_i^{c_i} / c_i,
/// obtained from lambda by w_i = a_i e^{-x_i}.
class CopulaTailForm {
 public:
  CopulaTailForm(ExponentialTailDensity etd, Eigen::VectorXd a);

  int dim() const noexcept { return etd_.dim(); }
  const ExponentialTailDensity& source() const noexcept { return etd_; }
  const Eigen::VectorXd& a() const noexcept { return a_; }
  double kappa() const noexcept { return etd_.kappa(); }

  double log_lambda_u(const Eigen::VectorXd& w) const;
  double lambda_u(const Eigen::VectorXd& w) const { return std::exp(log_lambda_u(w)); }
  double log_b_u(const Eigen::VectorXd& w) const;
  double b_u(const Eigen::VectorXd& w) const { return std::exp(log_b_u(w)); }

 private:
  ExponentialTailDensity etd_;
  Eigen::VectorXd a_;
  double log_scale_;  // log K - sum_i c_i log a_i
};

/// PreconditionError when the margins are not right-tail equivalent.
CopulaTailForm lambda_u_closed_form(const SkewEllipticalSpec& spec);

/// c(1 - u w) / c(1 - u w_ref). Requires 0 < u <= 1e-4, w and w_ref
/// positive, and every u w_i, u w_ref_i below 0.05.
double numeric_lambda_u_ratio(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& w_ref, double u);

/// | c(1 - u s w) / c(1 - u w) s^{d - kappa} - 1 |.
double scaling_defect_lambda_u(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w, double s,
                               double u);

/// C^(u w) / C^(u w_ref), which tends to b_U(w) / b_U(w_ref).
double numeric_b_u_ratio(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& w_ref, double u);

}  // namespace rapidtail
