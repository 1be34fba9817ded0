#include "rapidtail/extrapolate.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rapidtail/errors.hpp"

namespace rapidtail {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ((t2/t1)^p - 1) / (1 - (t2/t3)^p): ratio of consecutive differences of
// t^{-p} on the probes t1 < t2 < t3.
double difference_ratio(double t1, double t2, double t3, double p) {
  return std::expm1(p * std::log(t2 / t1)) / -std::expm1(p * std::log(t2 / t3));
}

}  // namespace

Extrapolation aitken_extrapolate(std::span<const double> values) {
  if (values.size() < 3) throw DomainError("aitken_extrapolate needs at least three terms");
  const std::size_t n = values.size();
  const double v1 = values[n - 3];
  const double v2 = values[n - 2];
  const double v3 = values[n - 1];
  const double d1 = v2 - v1;
  const double d2 = v3 - v2;
  const double denom = d2 - d1;
  if (d1 == 0.0 || d2 == 0.0 || denom == 0.0) return {v3, true, kNaN};
  const double limit = v3 - d2 * d2 / denom;
  if (!std::isfinite(limit)) return {v3, true, kNaN};
  return {limit, false, kNaN};
}

Extrapolation aitken_extrapolate(std::span<const double> probes, std::span<const double> values) {
  if (probes.size() != values.size()) throw ShapeError("probes and values differ in length");
  if (values.size() < 3) throw DomainError("aitken_extrapolate needs at least three terms");
  const std::size_t n = values.size();
  const double t1 = probes[n - 3];
  const double t2 = probes[n - 2];
  const double t3 = probes[n - 1];
  if (!(0.0 < t1 && t1 < t2 && t2 < t3)) throw DomainError("probes must be positive and increasing");
  const double v1 = values[n - 3];
  const double v2 = values[n - 2];
  const double v3 = values[n - 1];
  if (v1 == v2 || v2 == v3) return {v3, true, kNaN};

  const double ratio = (v1 - v2) / (v2 - v3);
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return aitken_extrapolate(values);

  // The difference ratio increases from log(t2/t1)/log(t3/t2) at p -> 0.
  const double floor_ratio = std::log(t2 / t1) / std::log(t3 / t2);
  if (ratio <= floor_ratio) return {v3, true, kNaN};

  constexpr double kMaxExponent = 64.0;
  if (ratio >= difference_ratio(t1, t2, t3, kMaxExponent)) return {v3, false, kMaxExponent};
  double lo = 0.0;
  double hi = kMaxExponent;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (difference_ratio(t1, t2, t3, mid) < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double p = 0.5 * (lo + hi);
  const double limit = v3 - (v2 - v3) / std::expm1(p * std::log(t3 / t2));
  if (!std::isfinite(limit)) return {v3, true, p};
  return {limit, false, p};
}

Extrapolation richardson_extrapolate(std::span<const double> h, std::span<const double> values) {
  if (h.size() != values.size()) throw ShapeError("h and values differ in length");
  if (h.empty()) throw DomainError("richardson_extrapolate needs at least one term");
  std::vector<double> p(values.begin(), values.end());
  const std::size_t n = p.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i + k < n; ++i) {
      const double dh = h[i + k] - h[i];
      if (dh == 0.0) throw DomainError("richardson_extrapolate needs distinct h");
      p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / dh;
    }
  }
  if (!std::isfinite(p[0])) return {values.back(), true, kNaN};
  return {p[0], n < 2, kNaN};
}

}  // namespace rapidtail
