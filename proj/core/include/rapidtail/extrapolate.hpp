#pragma once

#include <span>

namespace rapidtail {

struct Extrapolation {
  double value = 0.0;
  /// True when the accelerator could not be applied and `value` is the last
  /// element of the sequence.
  bool degenerate = false;
  /// Fitted decay exponent p of the grid-aware form (NaN otherwise).
  double exponent = 0.0;
};

/// Aitken's delta-squared limit of the last three terms of `values`
/// (at least three). Falls back to the last term, flagged degenerate, when a
/// consecutive difference vanishes or the second difference is zero.
Extrapolation aitken_extrapolate(std::span<const double> values);

/// Grid-aware Aitken: fits v(t) = L + C t^{-p} through the last three
/// (probe, value) pairs with p > 0 free. On a geometric grid this is exactly
/// the classic delta-squared limit. Oscillating tails fall back to the classic
/// form; tails that decay slower than any power are flagged degenerate.
Extrapolation aitken_extrapolate(std::span<const double> probes, std::span<const double> values);

/// Richardson (Neville) extrapolation to h = 0 of the interpolating
/// polynomial through (h_k, v_k); the h_k must be distinct.
Extrapolation richardson_extrapolate(std::span<const double> h, std::span<const double> values);

}  // namespace rapidtail
