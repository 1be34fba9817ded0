#pragma once

#include <concepts>

#include <Eigen/Dense>

#include "rapidtail/skewell.hpp"
#include "rapidtail/tails1d.hpp"

namespace rapidtail {

/// lambda(w) = K exp(-w . c) with rate c = Sigma^{-1} 1^T and
/// kappa = sum_i c_i = 1 Sigma^{-1} 1^T.
class ExponentialTailDensity {
 public:
  ExponentialTailDensity(double log_coeff, Eigen::VectorXd rate);

  int dim() const noexcept { return static_cast<int>(rate_.size()); }
  double log_coeff() const noexcept { return log_coeff_; }
  const Eigen::VectorXd& rate() const noexcept { return rate_; }
  double kappa() const noexcept { return kappa_; }

  double log_eval(const Eigen::VectorXd& w) const;
  double operator()(const Eigen::VectorXd& w) const { return std::exp(log_eval(w)); }

 private:
  double log_coeff_;
  Eigen::VectorXd rate_;
  double kappa_;
};

/// Anything exposing log lambda(w) and its tail order.
template <typename T>
concept TailDensityModel = requires(const T& model, const Eigen::VectorXd& w) {
  { model.log_eval(w) } -> std::convertible_to<double>;
  { model.kappa() } -> std::convertible_to<double>;
};

/// K = 2|Sigma|^{-1/2} when 1theta^T != 0 and |Sigma|^{-1/2} otherwise.
/// PreconditionError if the margins are not right-tail equivalent;
/// NonIntegrableOrthant if a rate component is not positive.
ExponentialTailDensity closed_form_tail_density(const SkewEllipticalSpec& spec);

/// log of f(t1 + m(t) w) / (m(t)^{-d} V(t)^kappa) under the canonical
/// scaling; t >= 2.
double log_numeric_lambda(const CanonicalScaling& scaling, const Eigen::VectorXd& w, double t);
double numeric_lambda(const CanonicalScaling& scaling, const Eigen::VectorXd& w, double t);
double numeric_lambda(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w, double t);

/// The finite-t estimator at a fixed t, usable wherever a TailDensityModel is.
class NumericTailDensity {
 public:
  NumericTailDensity(CanonicalScaling scaling, double t) : scaling_(std::move(scaling)), t_(t) {}
  double log_eval(const Eigen::VectorXd& w) const { return log_numeric_lambda(scaling_, w, t_); }
  double kappa() const noexcept { return scaling_.kappa(); }
  double t() const noexcept { return t_; }

 private:
  CanonicalScaling scaling_;
  double t_;
};

/// | lambda(x + z1) e^{z kappa} / lambda(x) - 1 |.
template <TailDensityModel Model>
double additive_stability_defect(const Model& model, const Eigen::VectorXd& x, double z) {
  if (z == 0.0) return 0.0;
  const Eigen::VectorXd shifted = x.array() + z;
  const double log_ratio = model.log_eval(shifted) + z * model.kappa() - model.log_eval(x);
  return std::abs(std::expm1(log_ratio));
}

/// log int_{[x, inf)} lambda(w) dw = log K - x . c - sum_i log c_i.
/// NonIntegrableOrthant if some c_i <= 0.
double log_upper_integral(const ExponentialTailDensity& etd, const Eigen::VectorXd& x);

}  // namespace rapidtail
