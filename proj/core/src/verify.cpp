#include "rapidtail/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <random>
#include <utility>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"
#include "rapidtail/normal.hpp"
#include "rapidtail/quadrature.hpp"
#include "rapidtail/tailasym.hpp"

namespace rapidtail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates fn(0..n-1) on concurrent workers; results come back in index
// order and the first exception (by index) is rethrown.
template <typename Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::future<R>> futures;
  futures.reserve(n);
  for (std::size_t k = 0; k < n; ++k) futures.push_back(std::async(std::launch::async, fn, k));
  std::vector<R> out;
  out.reserve(n);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

void check_grid(std::span<const double> grid, double min_probe) {
  if (grid.size() < 3) throw DomainError("probe grid needs at least three points");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw DomainError("probe grid has a non-finite entry");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw DomainError("probe grid must be strictly increasing");
  }
  if (grid.front() < min_probe)
    throw DomainError(fmt::format("smallest probe must be at least {}, got {}", min_probe, grid.front()));
}

// ---------------------------------------------------------------------------
// Nested quadrature

class NestedSurvival {
 public:
  NestedSurvival(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a)
      : spec_(spec), a_(a), y_(spec.dim()) {}

  quad::LogIntegral run() { return integrate_axis(0); }

 private:
  // Gaussian regression of axis k on the axes already fixed; the skew term is
  // ignored since this only places the split point.
  double center(int k) const {
    if (k == 0) return spec_.mu()[0];
    const auto& s = spec_.sigma();
    const Eigen::MatrixXd s11 = s.topLeftCorner(k, k);
    const Eigen::VectorXd s21 = s.block(k, 0, 1, k).transpose();
    const Eigen::VectorXd dy = y_.head(k) - spec_.mu().head(k);
    return spec_.mu()[k] + s21.dot(s11.ldlt().solve(dy));
  }

  quad::LogIntegral integrate_axis(int k) {
    const int d = spec_.dim();
    quad::Options opts;
    // Non-normal densities are themselves quadrature results.
    const double inner = spec_.is_normal() ? 1e-11 : 1e-9;
    opts.rel_tol = k + 1 == d ? inner : 100.0 * inner;
    opts.max_panels = 4000;
    quad::LogIntegrand f = [this, k, d](double yk) {
      y_[k] = yk;
      if (k == d - 1) return log_density(spec_, y_);
      return integrate_axis(k + 1).log_value;
    };
    const double lo = a_[k];
    const double c = center(k);
    if (!(lo < c)) return quad::log_integrate(f, lo, kInf, opts);
    // Split at the bulk so neither half-line map has to reach across it.
    opts.center = c;
    const auto left = quad::log_integrate(f, lo, c, opts);
    const auto right = quad::log_integrate(f, c, kInf, opts);
    return {quad::log_sum_exp(left.log_value, right.log_value),
            std::max(left.rel_error, right.rel_error), left.evaluations + right.evaluations};
  }

  const SkewEllipticalSpec& spec_;
  const Eigen::VectorXd& a_;
  Eigen::VectorXd y_;
};

// ---------------------------------------------------------------------------
// Importance sampling

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Streaming log-sum-exp of w and w^2.
struct WeightSums {
  double max = -kInf;
  double s1 = 0.0;  // sum exp(lw - max)
  double s2 = 0.0;  // sum exp(2 (lw - max))

  void add(double lw) {
    if (lw == -kInf) return;
    if (lw > max) {
      const double r = std::exp(max - lw);
      s1 *= r;
      s2 *= r * r;
      max = lw;
    }
    const double e = std::exp(lw - max);
    s1 += e;
    s2 += e * e;
  }

  void merge(const WeightSums& o) {
    if (o.max == -kInf) return;
    if (o.max > max) {
      const double r = std::exp(max - o.max);
      s1 = s1 * r + o.s1;
      s2 = s2 * r * r + o.s2;
      max = o.max;
    } else {
      const double r = std::exp(o.max - max);
      s1 += o.s1 * r;
      s2 += o.s2 * r * r;
    }
  }
};

}  // namespace

JointSurvival joint_survival_quadrature(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a) {
  if (a.size() != spec.dim()) throw ShapeError("corner has the wrong length");
  if (spec.dim() > 3) throw InvalidDimension("quadrature joint survival supports d <= 3");
  if (a.array().isNaN().any()) throw DomainError("corner has a NaN entry");
  NestedSurvival integrand(spec, a);
  const auto r = integrand.run();
  return {std::min(r.log_value, 0.0), r.rel_error, SurvivalMethod::quadrature, 0};
}

JointSurvival joint_survival_importance(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a,
                                        const ImportanceOptions& opts) {
  const int d = spec.dim();
  if (a.size() != d) throw ShapeError("corner has the wrong length");
  if (d > 8) throw InvalidDimension("importance-sampling joint survival supports d <= 8");
  if (!a.allFinite()) throw DomainError("importance sampling needs a finite corner");
  if (opts.streams < 1 || opts.samples < static_cast<std::uint64_t>(opts.streams))
    throw DomainError("importance sampling needs at least one sample per stream");

  const Eigen::MatrixXd chol = spec.sigma().llt().matrixL();
  const double log_norm = 0.5 * d * normal::kLogTwoPi + 0.5 * spec.log_det_sigma();
  const auto streams = static_cast<std::size_t>(opts.streams);

  auto run_stream = [&](std::size_t s) {
    const std::uint64_t n = opts.samples / streams + (s < opts.samples % streams ? 1 : 0);
    std::mt19937_64 rng(splitmix64(opts.seed ^ splitmix64(s)));
    std::normal_distribution<double> gauss;
    WeightSums sums;
    Eigen::VectorXd eps(d);
    for (std::uint64_t k = 0; k < n; ++k) {
      for (int i = 0; i < d; ++i) eps[i] = gauss(rng);
      const Eigen::VectorXd step = chol * eps;
      if ((step.array() <= 0.0).any()) continue;
      // Proposal density N(a, Sigma) at a + L eps.
      const double log_q = -0.5 * eps.squaredNorm() - log_norm;
      sums.add(log_density(spec, a + step) - log_q);
    }
    return sums;
  };
  const auto parts = parallel_map(streams, run_stream);
  WeightSums total;
  for (const auto& p : parts) total.merge(p);

  const double n = static_cast<double>(opts.samples);
  JointSurvival out;
  out.method = SurvivalMethod::importance_sampling;
  out.samples = opts.samples;
  if (total.max == -kInf) {
    out.log_prob = -kInf;
    out.rel_error = kInf;
  } else {
    const double log_s1 = total.max + std::log(total.s1);
    out.log_prob = log_s1 - std::log(n);
    // Var(w) / mean^2 = n s2 / s1^2 - 1 (with the shared max cancelling).
    const double cv2 = n * total.s2 / (total.s1 * total.s1) - 1.0;
    out.rel_error = std::sqrt(std::max(cv2, 0.0) / n);
  }
  if (!(out.rel_error <= opts.max_rel_error)) {
    throw InconclusiveEstimate(
        fmt::format("importance sampling relative standard error {:.3g} exceeds {:.3g} after {} samples",
                    out.rel_error, opts.max_rel_error, opts.samples),
        out.log_prob, out.rel_error);
  }
  return out;
}

JointSurvival joint_survival(const SkewEllipticalSpec& spec, const Eigen::VectorXd& a) {
  if (spec.dim() <= 3) return joint_survival_quadrature(spec, a);
  return joint_survival_importance(spec, a);
}

// ---------------------------------------------------------------------------
// Reports

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(Extrapolator e) {
  switch (e) {
    case Extrapolator::aitken: return "aitken";
    case Extrapolator::richardson: return "richardson";
    case Extrapolator::none: return "none";
  }
  return "?";
}

double ConvergenceReport::final_rel_error() const {
  if (!target) return kNaN;
  return std::abs(extrapolated / *target - 1.0);
}

ConvergenceReport make_report(std::string name, std::vector<double> probes,
                              std::vector<double> raw, std::optional<double> target,
                              double threshold, Extrapolator method, std::span<const double> h) {
  if (probes.size() != raw.size()) throw ShapeError("probe and value lists differ in length");
  if (probes.empty()) throw DomainError("report needs at least one probe");
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (!std::isfinite(raw[k])) throw NumericFailure(fmt::format("{}: non-finite value at probe {}", name, probes[k]), probes[k], probes[k]);
    if (k > 0 && !(probes[k] > probes[k - 1])) throw DomainError("probe grid must be strictly increasing");
  }

  ConvergenceReport r;
  r.name = std::move(name);
  r.threshold = threshold;
  r.method = method;
  r.target = target;

  const bool positive = std::all_of(raw.begin(), raw.end(), [](double v) { return v > 0.0; });
  std::vector<double> work(raw);
  if (positive)
    for (double& v : work) v = std::log(v);

  Extrapolation ex{work.back(), false, kNaN};
  if (method == Extrapolator::aitken) {
    ex = aitken_extrapolate(probes, work);
  } else if (method == Extrapolator::richardson) {
    if (h.size() != work.size()) throw ShapeError("Richardson abscissae missing");
    ex = richardson_extrapolate(h, work);
  }
  r.extrapolated = positive ? std::exp(ex.value) : ex.value;
  r.degenerate_extrapolation = ex.degenerate;

  const double ref = target ? *target : r.extrapolated;
  r.rel_errors.reserve(raw.size());
  for (double v : raw) r.rel_errors.push_back(v / ref - 1.0);

  if (target) {
    r.verdict = r.final_rel_error() < threshold ? Verdict::pass : Verdict::fail;
  } else {
    const std::size_t n = raw.size();
    bool decreasing = n >= 3;
    for (std::size_t k = n >= 3 ? n - 2 : n; k < n; ++k)
      decreasing = decreasing && std::abs(r.rel_errors[k]) < std::abs(r.rel_errors[k - 1]);
    r.verdict = decreasing ? Verdict::pass : Verdict::inconclusive;
  }
  r.probe_grid = std::move(probes);
  r.raw_values = std::move(raw);
  return r;
}

namespace {

ConvergenceReport rapid_variation_report(const CanonicalScaling& scaling, const Eigen::VectorXd& x,
                                         std::span<const double> t_grid, ReportOptions opts,
                                         double target) {
  const auto& spec = scaling.spec();
  auto probe = [&](std::size_t k) {
    const double t = t_grid[k];
    const double m = scaling.m(t);
    const Eigen::VectorXd corner = spec.mu().array() + t + (m * x).array();
    const double log_p = joint_survival(spec, corner).log_prob;
    return std::pair{std::exp(log_p - scaling.log_survival_normalizer(t)), m * m};
  };
  const auto vals = parallel_map(t_grid.size(), probe);
  std::vector<double> raw, h;
  for (const auto& [v, hk] : vals) {
    raw.push_back(v);
    h.push_back(hk);
  }
  return make_report("rapid_variation", {t_grid.begin(), t_grid.end()}, std::move(raw), target,
                     opts.threshold, opts.method, h);
}

ConvergenceReport tail_density_report(const CanonicalScaling& scaling, const Eigen::VectorXd& w,
                                      std::span<const double> t_grid, ReportOptions opts,
                                      double target) {
  auto probe = [&](std::size_t k) {
    const double t = t_grid[k];
    const double m = scaling.m(t);
    return std::pair{numeric_lambda(scaling, w, t), m * m};
  };
  const auto vals = parallel_map(t_grid.size(), probe);
  std::vector<double> raw, h;
  for (const auto& [v, hk] : vals) {
    raw.push_back(v);
    h.push_back(hk);
  }
  return make_report("tail_density", {t_grid.begin(), t_grid.end()}, std::move(raw), target,
                     opts.threshold, opts.method, h);
}

}  // namespace

ConvergenceReport verify_rapid_variation(const SkewEllipticalSpec& spec, const Eigen::VectorXd& x,
                                         std::span<const double> t_grid, ReportOptions opts) {
  if (x.size() != spec.dim()) throw ShapeError("x has the wrong length");
  check_grid(t_grid, 2.0);
  const auto scaling = build_scaling(spec);
  const auto etd = closed_form_tail_density(spec);
  const double target = std::exp(log_upper_integral(etd, x));
  return rapid_variation_report(scaling, x, t_grid, opts, target);
}

ConvergenceReport verify_tail_density(const SkewEllipticalSpec& spec, const Eigen::VectorXd& w,
                                      std::span<const double> t_grid, ReportOptions opts) {
  if (w.size() != spec.dim()) throw ShapeError("w has the wrong length");
  check_grid(t_grid, 2.0);
  const auto scaling = build_scaling(spec);
  const auto etd = closed_form_tail_density(spec);
  return tail_density_report(scaling, w, t_grid, opts, etd(w));
}

UniformityProbe probe_tail_density_uniformity(const SkewEllipticalSpec& spec,
                                              std::span<const Eigen::VectorXd> w_grid,
                                              std::span<const double> t_grid) {
  if (w_grid.empty()) throw DomainError("uniformity probe needs a nonempty w-grid");
  const auto scaling = build_scaling(spec);
  const auto etd = closed_form_tail_density(spec);
  auto sup_at = [&](std::size_t k) {
    double sup = 0.0;
    for (const auto& w : w_grid) {
      const double log_ratio = log_numeric_lambda(scaling, w, t_grid[k]) - etd.log_eval(w);
      sup = std::max(sup, std::abs(std::expm1(log_ratio)));
    }
    return sup;
  };
  UniformityProbe out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.sup_defect = parallel_map(t_grid.size(), sup_at);
  out.decreasing = true;
  for (std::size_t k = 1; k < out.sup_defect.size(); ++k)
    out.decreasing = out.decreasing && out.sup_defect[k] < out.sup_defect[k - 1];
  return out;
}

double bivariate_tail_constant(double theta_bar1, double theta_bar2) {
  const bool p1 = theta_bar1 > kZeroTolerance;
  const bool p2 = theta_bar2 > kZeroTolerance;
  if (p1 == p2) return 1.0;
  return p1 ? 0.5 : 2.0;
}

bool Example31Bundle::all_pass() const {
  for (const auto* r : reports())
    if (r->verdict != Verdict::pass) return false;
  return true;
}

Example31Bundle verify_example31(double rho, const Eigen::Vector2d& delta,
                                 const Example31Options& opts) {
  if (!(rho >= 0.0 && rho < 1.0) || !(delta[0] >= 0.0 && delta[1] >= 0.0)) {
    throw PreconditionError(fmt::format(
        "the bivariate skew-normal check covers only delta >= (0, 0) and 0 <= rho < 1; got rho = {}, "
        "delta = ({}, {})",
        rho, delta[0], delta[1]));
  }
  const auto spec = make_bivariate_skew_normal(rho, delta[0], delta[1]);
  check_grid(opts.constant_grid, 2.0);
  check_grid(opts.tail_grid, 2.0);
  check_grid(opts.survival_grid, 2.0);

  Example31Bundle out;

  // a_2 = lim f_2(t) / f_1(t).
  {
    std::vector<double> raw;
    for (double t : opts.constant_grid)
      raw.push_back(std::exp(marginal_log_density(spec, 1, t) - marginal_log_density(spec, 0, t)));
    const double target = bivariate_tail_constant(spec.theta_bar()[0], spec.theta_bar()[1]);
    out.tail_constant = make_report("tail_constant_a2", opts.constant_grid, std::move(raw), target,
                                    1e-3, Extrapolator::aitken);
  }
  out.kappa = make_report("kappa_u", {rho}, {spec.kappa_u()}, 2.0 / (1.0 + rho), 1e-12,
                          Extrapolator::none);
  out.kappa.probe_label = "rho";

  const bool skewed = spec.theta()[0] > kZeroTolerance || spec.theta()[1] > kZeroTolerance;
  const double k = (skewed ? 2.0 : 1.0) / std::sqrt(1.0 - rho * rho);
  const auto scaling = build_scaling(spec);

  const double lambda_target = k * std::exp(-(opts.w[0] + opts.w[1]) / (1.0 + rho));
  out.tail_density = tail_density_report(scaling, opts.w, opts.tail_grid,
                                         {opts.threshold, Extrapolator::aitken}, lambda_target);

  const double survival_target =
      k * (1.0 + rho) * (1.0 + rho) * std::exp(-(opts.x[0] + opts.x[1]) / (1.0 + rho));
  out.rapid_variation = rapid_variation_report(
      scaling, opts.x, opts.survival_grid, {opts.threshold, Extrapolator::richardson}, survival_target);
  return out;
}

}  // namespace rapidtail
