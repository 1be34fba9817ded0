#include "rapidtail/generators.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"
#include "rapidtail/normal.hpp"
#include "rapidtail/quadrature.hpp"

namespace rapidtail {

std::string_view to_string(GeneratorFamily family) {
  switch (family) {
    case GeneratorFamily::builtin_normal:
      return "normal";
    case GeneratorFamily::reduced:
      return "reduced";
    case GeneratorFamily::user:
      return "user";
  }
  return "unknown";
}

DensityGenerator::DensityGenerator(int dim, LogFn log_g, AuxFn aux_m, GeneratorFamily family)
    : dim_(dim), family_(family) {
  if (dim < 1) throw InvalidDimension(fmt::format("generator dimension must be >= 1, got {}", dim));
  if (!log_g || !aux_m) throw DomainError("generator requires both log_g and aux_m");
  log_g_ = std::make_shared<const LogFn>(std::move(log_g));
  aux_m_ = std::make_shared<const AuxFn>(std::move(aux_m));
}

double DensityGenerator::operator()(double s) const { return std::exp(log_g(s)); }

DensityGenerator make_normal_generator(int d) {
  if (d < 1) throw InvalidDimension(fmt::format("normal generator needs d >= 1, got {}", d));
  const double log_norm = -0.5 * d * normal::kLogTwoPi;
  return DensityGenerator(
      d, [log_norm](double s) { return log_norm - 0.5 * s; }, [](double t) { return 1.0 / t; },
      GeneratorFamily::builtin_normal);
}

double normalization_defect(const DensityGenerator& gen) {
  const int d = gen.dim();
  // r = v^2 removes the r^{d/2-1} endpoint singularity for d = 1:
  //   int_0^inf r^{d/2-1} g(r) dr = 2 int_0^inf v^{d-1} g(v^2) dv.
  const auto log_integrand = [&gen, d](double v) {
    if (v <= 0.0) return d == 1 ? gen.log_g(0.0) : -std::numeric_limits<double>::infinity();
    return (d - 1) * std::log(v) + gen.log_g(v * v);
  };
  quad::Options opts;
  opts.rel_tol = 1e-10;
  // Scale of the map follows the bulk of the integrand rather than its
  // behaviour at v = 0, where it may be increasing.
  opts.scale = std::sqrt(static_cast<double>(d));
  const auto res = quad::log_integrate(log_integrand, 0.0, std::numeric_limits<double>::infinity(), opts);
  const double integral = 2.0 * std::exp(res.log_value);
  const double target = std::exp(std::lgamma(0.5 * d) - 0.5 * d * std::log(std::numbers::pi));
  return std::abs(integral - target);
}

DensityGenerator reduce_dimension(const DensityGenerator& gen) {
  if (gen.dim() < 2) {
    throw InvalidDimension(fmt::format("reduce_dimension needs dim >= 2, got {}", gen.dim()));
  }
  // A reduced parent carries its own quadrature noise, which caps what this
  // level can resolve.
  const double tol = gen.family() == GeneratorFamily::reduced ? 1e-9 : 1e-12;
  auto log_reduced = [parent = gen, tol](double s) {
    const auto integrand = [&parent, s](double r) { return parent.log_g(r * r + s); };
    quad::Options opts;
    opts.rel_tol = tol;
    const auto res = quad::log_integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), opts);
    return std::numbers::ln2 + res.log_value;
  };
  return DensityGenerator(gen.dim() - 1, std::move(log_reduced), gen.aux_fn(),
                          GeneratorFamily::reduced);
}

namespace {

void check_nonnegative_definite(const Eigen::MatrixXd& q) {
  if (q.rows() != q.cols()) throw ShapeError("Q must be square");
  const double norm = q.cwiseAbs().maxCoeff();
  if (norm == 0.0) return;
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm) {
    throw InvalidMatrix("Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (smallest < -1e-10 * spectral) {
    throw InvalidMatrix(fmt::format("Q has eigenvalue {} below the nonnegativity floor", smallest));
  }
}

}  // namespace

double mda_gumbel_defect(const DensityGenerator& gen, const Eigen::MatrixXd& q,
                         const Eigen::VectorXd& x, double t) {
  check_nonnegative_definite(q);
  if (x.size() != q.rows()) throw ShapeError("x and Q dimensions differ");
  if (!(t > 0.0)) throw DomainError("t must be positive");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(x.size());
  const double m = gen.aux_m(t);
  const double one_q_one = ones.dot(q * ones);
  const double x_q_one = x.dot(q * ones);
  const double x_q_x = x.dot(q * x);
  // Expanded so that x = 0 reproduces the reference argument bit for bit.
  const double shifted = std::max(0.0, t * t * one_q_one + 2.0 * t * m * x_q_one + m * m * x_q_x);
  const double reference = t * t * one_q_one;
  const double log_ratio = gen.log_g(shifted) - gen.log_g(reference) + x_q_one;
  return std::abs(std::expm1(log_ratio));
}

double self_neglecting_defect(const std::function<double(double)>& m, double t, double x) {
  const double mt = m(t);
  const double shifted = t + mt * x;
  if (!(shifted > 0.0)) {
    throw DomainError(fmt::format("t + m(t) x = {} must be positive", shifted));
  }
  return std::abs(m(shifted) / mt - 1.0);
}

double gamma_class_ratio(const std::function<double(double)>& log_g,
                         const std::function<double(double)>& m, double t, double x) {
  if (x == 0.0) return 1.0;
  return std::exp(log_g(t + m(t) * x) - log_g(t));
}

}  // namespace rapidtail
