#include "rapidtail/copulatail.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"
#include "rapidtail/tails1d.hpp"
#include "rapidtail/verify.hpp"

namespace rapidtail {
namespace {

void check_size(const SkewEllipticalSpec& spec, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != spec.dim())
    throw ShapeError(fmt::format("{} has {} entries, expected {}", what, v.size(), spec.dim()));
}

double log_copula_at(const SkewEllipticalSpec& spec, const Eigen::VectorXd& y) {
  double log_c = log_density(spec, y);
  for (int i = 0; i < spec.dim(); ++i) log_c -= marginal_log_density(spec, i, y[i]);
  return log_c;
}

void check_small_u(const Eigen::VectorXd& w, double u, const char* what) {
  if (!(u > 0.0 && u <= 1e-4))
    throw DomainError(fmt::format("u must lie in (0, 1e-4], got {}", u));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw DomainError(fmt::format("{} must be positive", what));
    if (!(u * w[i] < 0.05))
      throw DomainError(fmt::format("u * {}[{}] = {} is not below 0.05", what, i, u * w[i]));
  }
}

}  // namespace

double log_copula_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& u) {
  check_size(spec, u, "u");
  Eigen::VectorXd y(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0))
      throw DomainError(fmt::format("u[{}] = {} is outside (0, 1)", i, u[i]));
    y[i] = u[i] > 0.5 ? upper_quantile(spec, i, 1.0 - u[i]) : quantile(spec, i, u[i]);
  }
  return log_copula_at(spec, y);
}

double copula_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& u) {
  return std::exp(log_copula_density(spec, u));
}

double log_copula_density_upper(const SkewEllipticalSpec& spec, const Eigen::VectorXd& tail) {
  check_size(spec, tail, "tail");
  Eigen::VectorXd y(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    if (!(tail[i] > 0.0 && tail[i] < 1.0))
      throw DomainError(fmt::format("tail[{}] = {} is outside (0, 1)", i, tail[i]));
    y[i] = upper_quantile(spec, i, tail[i]);
  }
  return log_copula_at(spec, y);
}

double survival_copula_value(const SkewEllipticalSpec& spec, const Eigen::VectorXd& u) {
  check_size(spec, u, "u");
  Eigen::VectorXd a(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    if (!(u[i] > 0.0 && u[i] <= 1.0))
      throw DomainError(fmt::format("u[{}] = {} is outside (0, 1]", i, u[i]));
    a[i] = u[i] == 1.0 ? -std::numeric_limits<double>::infinity() : upper_quantile(spec, i, u[i]);
  }
  return std::exp(joint_survival(spec, a).log_prob);
}

CopulaTailForm::CopulaTailForm(ExponentialTailDensity etd, Eigen::VectorXd a)
    : etd_(std::move(etd)), a_(std::move(a)) {
  if (a_.size() != etd_.dim()) throw ShapeError("tail constants and rates differ in length");
  if ((a_.array() <= 0.0).any()) throw DomainError("tail constants must be positive");
  log_scale_ = etd_.log_coeff() - etd_.rate().dot(a_.array().log().matrix());
}

double CopulaTailForm::log_lambda_u(const Eigen::VectorXd& w) const {
  if (w.size() != dim()) throw ShapeError("w has the wrong length");
  if ((w.array() <= 0.0).any()) throw DomainError("lambda_U needs w > 0");
  return log_scale_ + (etd_.rate().array() - 1.0).matrix().dot(w.array().log().matrix());
}

double CopulaTailForm::log_b_u(const Eigen::VectorXd& w) const {
  if (w.size() != dim()) throw ShapeError("w has the wrong length");
  if ((w.array() < 0.0).any()) throw DomainError("b_U needs w >= 0");
  if ((w.array() == 0.0).any()) return -std::numeric_limits<double>::infinity();
  const auto& c = etd_.rate().array();
  return log_scale_ + (c * w.array().log() - c.log()).sum();
}

CopulaTailForm lambda_u_closed_form(const SkewEllipticalSpec& spec) {
  auto etd = closed_form_tail_density(spec);
  auto profile = tail_equivalence_profile(spec);
  return CopulaTailForm(std::move(etd), std::move(profile.a));
}

double numeric_lambda_u_ratio(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& w_ref, double u) {
  check_size(spec, w, "w");
  check_size(spec, w_ref, "w_ref");
  check_small_u(w, u, "w");
  check_small_u(w_ref, u, "w_ref");
  if (w == w_ref) return 1.0;
  return std::exp(log_copula_density_upper(spec, u * w) -
                  log_copula_density_upper(spec, u * w_ref));
}

double scaling_defect_lambda_u(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w, double s,
                               double u) {
  if (!(s > 0.0)) throw DomainError("scale s must be positive");
  check_size(spec, w, "w");
  check_small_u(w, u, "w");
  check_small_u(s * w, u, "s * w");
  if (s == 1.0) return 0.0;
  const double log_ratio = log_copula_density_upper(spec, (u * s) * w) -
                           log_copula_density_upper(spec, u * w) +
                           (spec.dim() - spec.kappa_u()) * std::log(s);
  return std::abs(std::expm1(log_ratio));
}

double numeric_b_u_ratio(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& w_ref, double u) {
  check_size(spec, w, "w");
  check_size(spec, w_ref, "w_ref");
  check_small_u(w, u, "w");
  check_small_u(w_ref, u, "w_ref");
  if (w == w_ref) return 1.0;
  auto corner = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd a(spec.dim());
    for (int i = 0; i < spec.dim(); ++i) a[i] = upper_quantile(spec, i, u * v[i]);
    return joint_survival(spec, a).log_prob;
  };
  return std::exp(corner(w) - corner(w_ref));
}

}  // namespace rapidtail
