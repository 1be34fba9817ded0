#pragma once

#include <functional>
#include <memory>
#include <string_view>

#include <Eigen/Dense>

namespace rapidtail {

enum class GeneratorFamily { builtin_normal, reduced, user };

std::string_view to_string(GeneratorFamily family);

/// Radial profile g_d of a d-dimensional elliptical density
///   f(x) = |Sigma|^{-1/2} g_d((x - mu) Sigma^{-1} (x - mu)^T),
/// held in log form together with the auxiliary (self-neglecting) function m
/// of its Gumbel max-domain of attraction.
///
/// Instances are immutable and cheap to copy; evaluation is thread-safe.
class DensityGenerator {
 public:
  using LogFn = std::function<double(double)>;
  using AuxFn = std::function<double(double)>;

  /// Throws InvalidDimension for dim < 1 and DomainError for empty callables.
  DensityGenerator(int dim, LogFn log_g, AuxFn aux_m,
                   GeneratorFamily family = GeneratorFamily::user);

  int dim() const noexcept { return dim_; }
  GeneratorFamily family() const noexcept { return family_; }

  /// log g_d(s) for s >= 0.
  double log_g(double s) const { return (*log_g_)(s); }
  double operator()(double s) const;

  /// Auxiliary function m(t), t > 0.
  double aux_m(double t) const { return (*aux_m_)(t); }

  const LogFn& log_fn() const noexcept { return *log_g_; }
  const AuxFn& aux_fn() const noexcept { return *aux_m_; }

 private:
  int dim_;
  GeneratorFamily family_;
  std::shared_ptr<const LogFn> log_g_;
  std::shared_ptr<const AuxFn> aux_m_;
};

/// g_d(s) = (2 pi)^{-d/2} exp(-s/2) with m(t) = 1/t.
DensityGenerator make_normal_generator(int d);

/// | int_0^inf r^{d/2-1} g_d(r) dr - Gamma(d/2) / pi^{d/2} |.
double normalization_defect(const DensityGenerator& gen);

/// g_d(s) = 2 int_0^inf g_{d+1}(r^2 + s) dr, evaluated lazily by log-domain
/// quadrature. The auxiliary function is inherited unchanged.
DensityGenerator reduce_dimension(const DensityGenerator& gen);

/// Finite-t defect of the quadratic Gumbel max-domain condition
///   | g({t1 + m(t)x} Q {t1 + m(t)x}^T) / [g(t^2 1Q1^T) exp(-x Q 1^T)] - 1 |.
/// Q must be symmetric nonnegative-definite (eigenvalue floor -1e-10 |Q|).
double mda_gumbel_defect(const DensityGenerator& gen, const Eigen::MatrixXd& q,
                         const Eigen::VectorXd& x, double t);

/// | m(t + m(t) x) / m(t) - 1 |; requires t + m(t) x > 0.
double self_neglecting_defect(const std::function<double(double)>& m, double t, double x);

/// g(t + m(t) x) / g(t) for a positive g supplied in log form. Membership in
/// the gamma class Gamma_alpha(m) means this tends to exp(alpha x).
double gamma_class_ratio(const std::function<double(double)>& log_g,
                         const std::function<double(double)>& m, double t, double x);

}  // namespace rapidtail
