#include "rapidtail/tailasym.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"

namespace rapidtail {
namespace {

void require_positive_rates(const Eigen::VectorXd& rate) {
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    if (!(rate(i) > 0.0)) {
      throw NonIntegrableOrthant(
          fmt::format("rate component {} = {} is not positive; the upper-orthant integral diverges",
                      i, rate(i)),
          static_cast<int>(i));
    }
  }
}

}  // namespace

ExponentialTailDensity::ExponentialTailDensity(double log_coeff, Eigen::VectorXd rate)
    : log_coeff_(log_coeff), rate_(std::move(rate)), kappa_(rate_.sum()) {
  if (rate_.size() < 1) throw ShapeError("rate vector must be non-empty");
}

double ExponentialTailDensity::log_eval(const Eigen::VectorXd& w) const {
  if (w.size() != rate_.size()) throw ShapeError("point dimension differs from tail density dimension");
  return log_coeff_ - w.dot(rate_);
}

ExponentialTailDensity closed_form_tail_density(const SkewEllipticalSpec& spec) {
  if (!tail_equivalence_profile(spec).equivalent()) {
    throw PreconditionError(
        "margins are not right-tail equivalent: theta_bar components have mixed signs "
        "(or the dispersion diagonal is not constant)");
  }
  require_positive_rates(spec.rate());
  double log_coeff = -0.5 * spec.log_det_sigma();
  if (std::abs(spec.theta_sum()) > kZeroTolerance) log_coeff += std::numbers::ln2;
  return {log_coeff, spec.rate()};
}

double log_numeric_lambda(const CanonicalScaling& scaling, const Eigen::VectorXd& w, double t) {
  const auto& spec = scaling.spec();
  if (w.size() != spec.dim()) throw ShapeError("w dimension differs from spec dimension");
  if (!(t >= 2.0)) throw DomainError(fmt::format("numeric_lambda needs t >= 2, got {}", t));
  const double m = scaling.m(t);
  const Eigen::VectorXd y = spec.mu().array() + t + (m * w).array();
  const double value = log_density(spec, y) - scaling.log_density_normalizer(t);
  if (!std::isfinite(value)) {
    throw NumericFailure(fmt::format("tail density ratio left the log range at t = {}", t));
  }
  return value;
}

double numeric_lambda(const CanonicalScaling& scaling, const Eigen::VectorXd& w, double t) {
  return std::exp(log_numeric_lambda(scaling, w, t));
}

double numeric_lambda(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w, double t) {
  return numeric_lambda(build_scaling(spec), w, t);
}

double log_upper_integral(const ExponentialTailDensity& etd, const Eigen::VectorXd& x) {
  require_positive_rates(etd.rate());
  if (x.size() != etd.dim()) throw ShapeError("x dimension differs from tail density dimension");
  return etd.log_coeff() - x.dot(etd.rate()) - etd.rate().array().log().sum();
}

}  // namespace rapidtail
