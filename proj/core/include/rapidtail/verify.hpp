#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rapidtail/extrapolate.hpp"
#include "rapidtail/skewell.hpp"
#include "rapidtail/tails1d.hpp"

namespace rapidtail {

// ---------------------------------------------------------------------------
// Joint survival P(Y > a)

enum class SurvivalMethod { quadrature, importance_sampling };

struct JointSurvival {
  double log_prob = 0.0;
  /// Estimated relative error: quadrature error estimate, or the standard
  /// error of the importance-sampling mean divided by the mean.
  double rel_error = 0.0;
  SurvivalMethod method = SurvivalMethod::quadrature;
  std::uint64_t samples = 0;
};

/// Nested log-domain adaptive quadrature over [a, inf); d <= 3. Components of
/// `a` may be -inf.
JointSurvival joint_survival_quadrature(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a);

struct ImportanceOptions {
  std::uint64_t seed = 20240601;
  std::uint64_t samples = 200000;
  int streams = 8;
  double max_rel_error = 0.10;
};

/// Mean-shifted importance sampling with proposal N(a, Sigma); d <= 8.
/// Each stream owns an RNG seeded from (seed, stream index); results are
/// merged in stream order, so the estimate is reproducible.
/// InconclusiveEstimate when the relative standard error exceeds
/// max_rel_error.
JointSurvival joint_survival_importance(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a,
                                        const ImportanceOptions& opts = {});

/// Quadrature for d <= 3, importance sampling (default options) for d <= 8.
JointSurvival joint_survival(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a);

// ---------------------------------------------------------------------------
// Convergence reports

enum class Verdict { pass, fail, inconclusive };
enum class Extrapolator { aitken, richardson, none };

std::string_view to_string(Verdict v);
std::string_view to_string(Extrapolator e);

struct ConvergenceReport {
  std::string name;
  std::string probe_label = "t";
  std::vector<double> probe_grid;
  std::vector<double> raw_values;
  double extrapolated = 0.0;
  std::optional<double> target;
  /// raw / target - 1 per probe (raw / extrapolated - 1 without a target).
  std::vector<double> rel_errors;
  Verdict verdict = Verdict::inconclusive;
  double threshold = 0.0;
  Extrapolator method = Extrapolator::aitken;
  bool degenerate_extrapolation = false;

  /// |extrapolated / target - 1|, or NaN without a target.
  double final_rel_error() const;
};

/// Builds a report from raw finite-probe values. Positive sequences are
/// extrapolated on the log scale. `h` supplies the Richardson abscissae
/// (ignored for the other methods).
ConvergenceReport make_report(std::string name, std::vector<double> probes,
                              std::vector<double> raw, std::optional<double> target,
                              double threshold, Extrapolator method,
                              std::span<const double> h = {});

struct ReportOptions {
  double threshold = 5e-3;
  Extrapolator method = Extrapolator::aitken;
};

/// P(Y > t1 + m(t) x) / V(t)^kappa over t_grid against
/// int_{[x, inf)} lambda(w) dw of the closed-form tail density. Richardson in
/// h = m(t)^2 is the default extrapolator for this report.
ConvergenceReport verify_rapid_variation(const SkewEllipticalSpec& spec, const Eigen::VectorXd& x,
                                         std::span<const double> t_grid,
                                         ReportOptions opts = {5e-3, Extrapolator::richardson});

/// numeric_lambda(w, t) over t_grid against the closed-form lambda(w).
ConvergenceReport verify_tail_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w,
                                      std::span<const double> t_grid, ReportOptions opts = {});

/// Finite-t surrogate for local uniformity: the largest tail-density defect
/// over a w-grid at each t. Heuristic only; it never sets a verdict.
struct UniformityProbe {
  std::vector<double> t_grid;
  std::vector<double> sup_defect;
  /// Sup defect strictly decreasing along t_grid.
  bool decreasing = false;
};

UniformityProbe probe_tail_density_uniformity(const SkewEllipticalSpec& spec,
                                              std::span<const Eigen::VectorXd> w_grid,
                                              std::span<const double> t_grid);

struct Example31Options {
  std::vector<double> tail_grid = {3, 4, 5, 6, 8};
  std::vector<double> survival_grid = {3, 4, 5, 6};
  std::vector<double> constant_grid = {10, 20, 40};
  Eigen::Vector2d w = Eigen::Vector2d(1.0, 1.0);
  Eigen::Vector2d x = Eigen::Vector2d(1.0, 1.0);
  double threshold = 5e-3;
};

struct Example31Bundle {
  ConvergenceReport tail_constant;
  ConvergenceReport kappa;
  ConvergenceReport tail_density;
  ConvergenceReport rapid_variation;
  bool all_pass() const;
  std::vector<const ConvergenceReport*> reports() const {
    return {&tail_constant, &kappa, &tail_density, &rapid_variation};
  }
};

/// Bivariate skew-normal with unit variances and correlation rho. Requires
/// rho >= 0 and delta >= 0 componentwise (PreconditionError otherwise).
Example31Bundle verify_example31(double rho, const Eigen::Vector2d& delta,
                                 const Example31Options& opts = {});

/// Closed-form a_2 for the bivariate skew-normal: 1 when both theta_bar are
/// zero or both positive, 1/2 when only the first is positive, 2 when only
/// the second is.
double bivariate_tail_constant(double theta_bar1, double theta_bar2);

}  // namespace rapidtail
