#include "rapidtail/skewell.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"
#include "rapidtail/extrapolate.hpp"
#include "rapidtail/normal.hpp"
#include "rapidtail/quadrature.hpp"

namespace rapidtail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DensityGenerator marginal_generator_for(const DensityGenerator& gen) {
  if (gen.family() == GeneratorFamily::builtin_normal) return make_normal_generator(2);
  DensityGenerator g = gen;
  while (g.dim() > 2) g = reduce_dimension(g);
  return g;
}

double log_normal_generator(int dim, double s) { return -0.5 * dim * normal::kLogTwoPi - 0.5 * s; }

}  // namespace

SkewEllipticalSpec build_spec(Eigen::VectorXd mu, Eigen::MatrixXd sigma, Eigen::VectorXd delta,
                              DensityGenerator generator) {
  const auto d = mu.size();
  if (d < 1) throw ShapeError("location vector must be non-empty");
  if (sigma.rows() != d || sigma.cols() != d) {
    throw ShapeError(fmt::format("Sigma is {}x{}, expected {}x{}", sigma.rows(), sigma.cols(), d, d));
  }
  if (delta.size() != d) throw ShapeError(fmt::format("delta has length {}, expected {}", delta.size(), d));
  if (generator.dim() != d + 1) {
    throw ShapeError(fmt::format("generator has dim {}, expected d + 1 = {}", generator.dim(), d + 1));
  }
  if (!mu.allFinite() || !sigma.allFinite() || !delta.allFinite()) {
    throw ShapeError("spec entries must be finite");
  }

  const double norm = sigma.cwiseAbs().maxCoeff();
  if (norm == 0.0 || (sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm) {
    throw InvalidDispersion("Sigma must be symmetric and non-zero");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
  const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() <= 1e-12 * spectral) {
    throw InvalidDispersion(fmt::format("Sigma is not positive-definite (smallest eigenvalue {})",
                                        eig.eigenvalues().minCoeff()));
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw InvalidDispersion("Cholesky factorization of Sigma failed");
  Eigen::MatrixXd sigma_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  sigma_inv = 0.5 * (sigma_inv + sigma_inv.transpose());

  const Eigen::VectorXd sinv_delta = sigma_inv * delta;
  const double skew_form = delta.dot(sinv_delta);
  if (!(skew_form < 1.0 - 1e-12)) {
    throw InvalidSkewness(fmt::format("delta Sigma^-1 delta^T = {} must be < 1", skew_form));
  }

  auto marginal = marginal_generator_for(generator);
  SkewEllipticalSpec spec(std::move(generator), std::move(marginal));
  spec.theta_ = sinv_delta / std::sqrt(1.0 - skew_form);
  spec.theta_bar_.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double standardized = delta(i) / std::sqrt(sigma(i, i));
    spec.theta_bar_(i) = standardized / std::sqrt(1.0 - standardized * standardized);
  }
  spec.rate_ = sigma_inv * Eigen::VectorXd::Ones(d);
  spec.kappa_u_ = spec.rate_.sum();
  spec.log_det_sigma_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  spec.sigma_inv_ = std::move(sigma_inv);
  spec.mu_ = std::move(mu);
  spec.sigma_ = std::move(sigma);
  spec.delta_ = std::move(delta);
  return spec;
}

SkewEllipticalSpec make_bivariate_skew_normal(double rho, double delta1, double delta2) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, rho, rho, 1.0;
  return build_spec(Eigen::VectorXd::Zero(2), sigma, Eigen::Vector2d(delta1, delta2),
                    make_normal_generator(3));
}

double log_conditional_integral(const DensityGenerator& gen, double b, double q) {
  if (gen.family() == GeneratorFamily::builtin_normal) {
    return log_normal_generator(gen.dim() - 1, q) + normal::log_cdf(b);
  }
  const auto integrand = [&gen, q](double r) { return gen.log_g(r * r + q); };
  quad::Options opts;
  opts.rel_tol = 1e-11;
  if (b < 0.0) return quad::log_integrate(integrand, -b, kInf, opts).log_value;
  const double half = quad::log_integrate(integrand, 0.0, kInf, opts).log_value;
  if (b == 0.0) return half;
  return quad::log_sum_exp(half, quad::log_integrate(integrand, 0.0, b, opts).log_value);
}

double log_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& y) {
  if (y.size() != spec.dim()) throw ShapeError("point dimension differs from spec dimension");
  const Eigen::VectorXd z = y - spec.mu();
  const double q = std::max(0.0, z.dot(spec.sigma_inv() * z));
  const double b = z.dot(spec.theta());
  const double log_front = std::numbers::ln2 - 0.5 * spec.log_det_sigma();
  if (spec.is_normal()) {
    return log_front + log_normal_generator(spec.dim(), q) + normal::log_cdf(b);
  }
  return log_front + log_conditional_integral(spec.generator(), b, q);
}

double marginal_log_density(const SkewEllipticalSpec& spec, int i, double t) {
  if (i < 0 || i >= spec.dim()) throw DomainError(fmt::format("margin index {} out of range", i));
  const double scale = std::sqrt(spec.sigma()(i, i));
  const double z = (t - spec.mu()(i)) / scale;
  const double tb = spec.theta_bar()(i);
  const double log_front = std::numbers::ln2 - std::log(scale);
  if (spec.is_normal()) return log_front + normal::log_pdf(z) + normal::log_cdf(tb * z);
  return log_front + log_conditional_integral(spec.marginal_generator(), tb * z, z * z);
}

Sample sample(const SkewEllipticalSpec& spec, std::size_t n, std::uint64_t seed) {
  if (!spec.is_normal()) {
    throw PreconditionError("sampling is implemented for the builtin normal generator only");
  }
  const int d = spec.dim();
  Eigen::MatrixXd joint(d + 1, d + 1);
  joint(0, 0) = 1.0;
  joint.block(0, 1, 1, d) = spec.delta().transpose();
  joint.block(1, 0, d, 1) = spec.delta();
  joint.block(1, 1, d, d) = spec.sigma();
  const Eigen::LLT<Eigen::MatrixXd> llt(joint);
  if (llt.info() != Eigen::Success) {
    throw InvalidSpec("joint dispersion of (X0, X) is not positive-definite; delta is inconsistent");
  }
  const Eigen::MatrixXd lower = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Sample out;
  out.draws.resize(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d + 1);
  std::size_t kept = 0;
  while (kept < n) {
    for (int k = 0; k <= d; ++k) z(k) = gauss(rng);
    const Eigen::VectorXd x = lower * z;
    ++out.proposals;
    if (x(0) > 0.0) {
      out.draws.row(static_cast<Eigen::Index>(kept)) = (spec.mu() + x.tail(d)).transpose();
      ++kept;
    }
  }
  return out;
}

std::string_view to_string(TailCondition c) {
  switch (c) {
    case TailCondition::all_nonnegative:
      return "all-nonnegative";
    case TailCondition::equal_negative:
      return "equal-negative";
    case TailCondition::not_equivalent:
      return "not-equivalent";
  }
  return "unknown";
}

Eigen::VectorXd numeric_tail_constants(const SkewEllipticalSpec& spec,
                                       std::span<const double> t_grid) {
  if (t_grid.size() < 3) throw DomainError("numeric_tail_constants needs at least three probes");
  const int d = spec.dim();
  Eigen::VectorXd a = Eigen::VectorXd::Ones(d);
  std::vector<double> ratios(t_grid.size());
  for (int i = 1; i < d; ++i) {
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const double t = t_grid[k];
      ratios[k] = std::exp(marginal_log_density(spec, i, spec.mu()(i) + t) -
                           marginal_log_density(spec, 0, spec.mu()(0) + t));
    }
    a(i) = aitken_extrapolate(t_grid, ratios).value;
  }
  return a;
}

TailEquivalenceProfile tail_equivalence_profile(const SkewEllipticalSpec& spec) {
  TailEquivalenceProfile profile;
  const int d = spec.dim();
  const auto diag = spec.sigma().diagonal();
  if ((diag.array() - diag(0)).abs().maxCoeff() > 1e-12 * diag(0)) return profile;

  const auto& tb = spec.theta_bar();
  if (tb.minCoeff() >= -kZeroTolerance) {
    profile.condition = TailCondition::all_nonnegative;
    if (spec.is_normal()) {
      // f_i(t) = 2 phi(t) Phi(theta_bar_i t): Phi -> 1 for positive skewness
      // and stays at 1/2 for zero skewness.
      const auto level = [](double v) { return v > kZeroTolerance ? 1.0 : 0.5; };
      profile.a.resize(d);
      for (int i = 0; i < d; ++i) profile.a(i) = level(tb(i)) / level(tb(0));
    } else {
      constexpr std::array<double, 3> kGrid = {10.0, 20.0, 40.0};
      profile.a = numeric_tail_constants(spec, kGrid);
    }
    return profile;
  }
  if (tb.maxCoeff() < 0.0 && tb.maxCoeff() - tb.minCoeff() <= kZeroTolerance) {
    profile.condition = TailCondition::equal_negative;
    profile.a = Eigen::VectorXd::Ones(d);
  }
  return profile;
}

}  // namespace rapidtail
