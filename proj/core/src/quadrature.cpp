#include "rapidtail/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include <fmt/format.h>

#include "rapidtail/errors.hpp"

namespace rapidtail::quad {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod abscissae on [-1, 1]; odd indices (and the center) are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Headroom before panel sums are rescaled to a new reference exponent.
constexpr double kRescaleMargin = 300.0;

struct Panel {
  double a;
  double b;
  double value;  // integral * exp(-ref)
  double error;
  bool refinable;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

// Integrand in the mapped coordinate u, including the log-Jacobian.
class MappedIntegrand {
 public:
  enum class Kind { finite, upper, lower };

  MappedIntegrand(const LogIntegrand& f, Kind kind, double anchor, double scale)
      : f_(f), kind_(kind), anchor_(anchor), scale_(scale) {}

  double operator()(double u) const {
    switch (kind_) {
      case Kind::finite:
        return f_(u);
      case Kind::upper:
      case Kind::lower: {
        const double one_minus = 1.0 - u;
        if (one_minus <= 0.0) return -kInf;
        const double offset = scale_ * u / one_minus;
        const double x = kind_ == Kind::upper ? anchor_ + offset : anchor_ - offset;
        const double v = f_(x);
        if (v == -kInf) return v;
        return v + std::log(scale_) - 2.0 * std::log(one_minus);
      }
    }
    return -kInf;
  }

  double to_x(double u) const {
    if (kind_ == Kind::finite) return u;
    if (u >= 1.0) return kind_ == Kind::upper ? kInf : -kInf;
    const double offset = scale_ * u / (1.0 - u);
    return kind_ == Kind::upper ? anchor_ + offset : anchor_ - offset;
  }

 private:
  const LogIntegrand& f_;
  Kind kind_;
  double anchor_;
  double scale_;
};

class Integrator {
 public:
  Integrator(const MappedIntegrand& g, const Options& opts) : g_(g), opts_(opts) {}

  LogIntegral run(double a, double b) {
    constexpr int kInitialPanels = 8;
    std::vector<std::array<double, 15>> logs(kInitialPanels);
    const double width = (b - a) / kInitialPanels;
    double peak = -kInf;
    for (int k = 0; k < kInitialPanels; ++k) {
      const double pa = a + k * width;
      const double pb = k + 1 == kInitialPanels ? b : pa + width;
      logs[k] = sample(pa, pb);
      for (double v : logs[k]) peak = std::max(peak, v);
    }
    if (peak == -kInf) return {-kInf, 0.0, evaluations_};
    ref_ = peak;
    have_ref_ = true;
    for (const auto& panel : logs) {
      for (double v : panel) note(v);
    }
    for (int k = 0; k < kInitialPanels; ++k) {
      const double pa = a + k * width;
      const double pb = k + 1 == kInitialPanels ? b : pa + width;
      push(rule(pa, pb, logs[k]));
    }

    while (true) {
      double total = value_sum_;
      double err = error_sum_;
      const double tol = effective_tol();
      if (err <= tol * total) {
        total = sum_values();
        err = sum_errors();
        if (err <= tol * total) return finish(total, err);
        value_sum_ = total;
        error_sum_ = err;
      }
      if (heap_.empty() || !heap_.top().refinable) {
        // Remaining error sits on panels that cannot be split further.
        if (err <= 1e3 * tol * total) return finish(total, err);
        fail(total, err);
      }
      if (static_cast<int>(heap_.size() + done_.size()) >= opts_.max_panels) fail(total, err);
      const Panel worst = heap_.top();
      heap_.pop();
      value_sum_ -= worst.value;
      error_sum_ -= worst.error;
      const double mid = 0.5 * (worst.a + worst.b);
      if (!(mid > worst.a && mid < worst.b)) {
        push({worst.a, worst.b, worst.value, worst.error, false});
        continue;
      }
      auto left = sample(worst.a, mid);
      auto right = sample(mid, worst.b);
      const double local_peak = std::max(*std::max_element(left.begin(), left.end()),
                                         *std::max_element(right.begin(), right.end()));
      if (local_peak > ref_ + kRescaleMargin) rescale(local_peak);
      push(rule(worst.a, mid, left));
      push(rule(mid, worst.b, right));
    }
  }

 private:
  std::array<double, 15> sample(double a, double b) {
    std::array<double, 15> out{};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (int j = 0; j < 7; ++j) {
      out[2 * j] = eval(c - h * kXgk[j]);
      out[2 * j + 1] = eval(c + h * kXgk[j]);
    }
    out[14] = eval(c);
    return out;
  }

  double eval(double u) {
    ++evaluations_;
    const double v = g_(u);
    if (have_ref_) note(v);
    if (std::isnan(v) || v == kInf) {
      throw NumericFailure(fmt::format("integrand returned {} at x = {}", v, g_.to_x(u)),
                           g_.to_x(u), g_.to_x(u));
    }
    return v;
  }

  Panel rule(double a, double b, const std::array<double, 15>& logs) const {
    std::array<double, 15> f{};
    for (int j = 0; j < 15; ++j) f[j] = std::exp(logs[j] - ref_);
    const double h = 0.5 * (b - a);
    const double fc = f[14];
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
      const double pair = f[2 * j] + f[2 * j + 1];
      resk += kWgk[j] * pair;
      resabs += kWgk[j] * (std::abs(f[2 * j]) + std::abs(f[2 * j + 1]));
      if (j % 2 == 1) resg += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(f[2 * j] - mean) + std::abs(f[2 * j + 1] - mean));
    }
    const double dh = std::abs(h);
    const double result = resk * h;
    resabs *= dh;
    resasc *= dh;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
      err = std::max(50.0 * kEps * resabs, err);
    }
    const bool at_roundoff = err <= 50.0 * kEps * resabs * 1.0000001;
    return {a, b, result, err, !at_roundoff};
  }

  void push(const Panel& p) {
    value_sum_ += p.value;
    error_sum_ += p.error;
    if (p.refinable) {
      heap_.push(p);
    } else {
      done_.push_back(p);
    }
  }

  void rescale(double new_ref) {
    const double factor = std::exp(ref_ - new_ref);
    std::vector<Panel> items;
    while (!heap_.empty()) {
      items.push_back(heap_.top());
      heap_.pop();
    }
    for (auto& p : items) {
      p.value *= factor;
      p.error *= factor;
      heap_.push(p);
    }
    for (auto& p : done_) {
      p.value *= factor;
      p.error *= factor;
    }
    ref_ = new_ref;
    value_sum_ = sum_values();
    error_sum_ = sum_errors();
  }

  double sum_values() const {
    double s = 0.0;
    for (const auto& p : done_) s += p.value;
    auto copy = heap_;
    while (!copy.empty()) {
      s += copy.top().value;
      copy.pop();
    }
    return s;
  }

  double sum_errors() const {
    double s = 0.0;
    for (const auto& p : done_) s += p.error;
    auto copy = heap_;
    while (!copy.empty()) {
      s += copy.top().error;
      copy.pop();
    }
    return s;
  }

  // Only nodes within reach of the running peak contribute to the sum.
  void note(double v) {
    if (std::isfinite(v) && v > ref_ - 40.0) max_abs_log_ = std::max(max_abs_log_, std::abs(v));
  }

  // exp(L) inherits a relative error of roughly eps * |L| from its argument,
  // so a requested tolerance below that floor is unreachable.
  double effective_tol() const { return std::max(opts_.rel_tol, 64.0 * kEps * max_abs_log_); }

  LogIntegral finish(double total, double err) const {
    if (total <= 0.0) return {-kInf, 0.0, evaluations_};
    return {ref_ + std::log(total), err / total, evaluations_};
  }

  [[noreturn]] void fail(double total, double err) const {
    double lo = 0.0;
    double hi = 0.0;
    if (!heap_.empty()) {
      lo = g_.to_x(heap_.top().a);
      hi = g_.to_x(heap_.top().b);
    }
    throw NumericFailure(
        fmt::format("quadrature did not converge: relative error {:.3g} > {:.3g} after {} panels; "
                    "worst bracket [{}, {}]",
                    total > 0 ? err / total : err, effective_tol(), heap_.size() + done_.size(), lo, hi),
        lo, hi);
  }

  const MappedIntegrand& g_;
  const Options& opts_;
  double ref_ = 0.0;
  double value_sum_ = 0.0;
  double error_sum_ = 0.0;
  double max_abs_log_ = 0.0;
  bool have_ref_ = false;
  int evaluations_ = 0;
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap_;
  std::vector<Panel> done_;
};

LogIntegral integrate_half_line(const LogIntegrand& log_f, double anchor, int direction,
                                const Options& opts) {
  const double scale = opts.scale > 0.0 ? opts.scale : decay_scale(log_f, anchor, direction);
  const auto kind = direction > 0 ? MappedIntegrand::Kind::upper : MappedIntegrand::Kind::lower;
  MappedIntegrand g(log_f, kind, anchor, scale);
  return Integrator(g, opts).run(0.0, 1.0);
}

}  // namespace

LogIntegral log_integrate(const LogIntegrand& log_f, double lo, double hi, const Options& opts) {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("log_integrate: NaN bound");
  if (lo == hi) return {};
  if (lo > hi) throw DomainError(fmt::format("log_integrate: empty range [{}, {}]", lo, hi));

  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (!lo_inf && !hi_inf) {
    MappedIntegrand g(log_f, MappedIntegrand::Kind::finite, 0.0, 1.0);
    return Integrator(g, opts).run(lo, hi);
  }
  if (!lo_inf) return integrate_half_line(log_f, lo, +1, opts);
  if (!hi_inf) return integrate_half_line(log_f, hi, -1, opts);

  const auto left = integrate_half_line(log_f, opts.center, -1, opts);
  const auto right = integrate_half_line(log_f, opts.center, +1, opts);
  const double total = log_sum_exp(left.log_value, right.log_value);
  const double err = std::max(left.rel_error, right.rel_error);
  return {total, err, left.evaluations + right.evaluations};
}

double decay_scale(const LogIntegrand& log_f, double x0, int direction) {
  const double dir = direction >= 0 ? 1.0 : -1.0;
  const double f0 = log_f(x0);
  if (!std::isfinite(f0)) return 1.0;
  auto dropped = [&](double h) { return f0 - log_f(x0 + dir * h) >= 1.0; };
  double h = 1.0;
  if (dropped(h)) {
    while (h > 1e-10 && dropped(0.5 * h)) h *= 0.5;
    return h;
  }
  while (h < 1e8 && !dropped(h)) h *= 2.0;
  return h;
}

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_sum_exp(std::span<const double> xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (m == -kInf || m == kInf) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_diff_exp(double a, double b) {
  if (b == -kInf) return a;
  if (b > a) throw DomainError("log_diff_exp: b > a");
  if (b == a) return -kInf;
  return a + std::log(-std::expm1(b - a));
}

}  // namespace rapidtail::quad
