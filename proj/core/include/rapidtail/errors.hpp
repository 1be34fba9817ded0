#pragma once

#include <stdexcept>
#include <string>

namespace rapidtail {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// Vector and matrix arguments whose shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A matrix that is not symmetric nonnegative-definite.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

class InvalidDispersion : public Error {
 public:
  using Error::Error;
};

class InvalidSkewness : public Error {
 public:
  using Error::Error;
};

/// The joint dispersion of (X0, X) is not positive-definite.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an object that does not satisfy its
/// documented precondition (e.g. margins that are not tail equivalent).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing failed inside the admissible search range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The upper-orthant integral of an exponential tail density diverges
/// because a rate component is not positive.
class NonIntegrableOrthant : public Error {
 public:
  NonIntegrableOrthant(const std::string& what, int component)
      : Error(what), component_(component) {}
  int component() const noexcept { return component_; }

 private:
  int component_;
};

/// Quadrature failed to reach its tolerance, or a log-domain value left the
/// representable range. Carries the sub-interval with the largest error.
class NumericFailure : public Error {
 public:
  explicit NumericFailure(const std::string& what, double lo = 0.0, double hi = 0.0)
      : Error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// An importance-sampling estimate whose relative standard error exceeded
/// the acceptance threshold after the full sample budget.
class InconclusiveEstimate : public Error {
 public:
  InconclusiveEstimate(const std::string& what, double log_estimate, double rel_std_error)
      : Error(what), log_estimate_(log_estimate), rel_std_error_(rel_std_error) {}
  double log_estimate() const noexcept { return log_estimate_; }
  double rel_std_error() const noexcept { return rel_std_error_; }

 private:
  double log_estimate_;
  double rel_std_error_;
};

}  // namespace rapidtail
