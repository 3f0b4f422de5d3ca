#pragma once

#include <stdexcept>
#include <string>

namespace m1dg {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (e.g. a non-realizable moment vector passed to the closure).
class DomainError : public Error {
public:
  using Error::Error;
};

/// The directional Jacobian is singular at the realizability boundary.
class SingularityError : public DomainError {
public:
  using DomainError::DomainError;
};

/// The eigenvector matrix is too ill-conditioned (or the eigenproblem has
/// complex eigenvalues) to be used for a characteristic transform.
class ConditioningError : public Error {
public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition_estimate() const noexcept { return condition_; }

private:
  double condition_;
};

/// Invalid user-facing configuration: scenario parameters, mesh sizes, labels.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent input text (mesh listings, CSV files).
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Non-finite data produced by an initial condition or a coefficient field.
class DataError : public Error {
public:
  using Error::Error;
};

/// The time integration produced non-finite values.
class BlowUpError : public Error {
public:
  using Error::Error;
};

/// A limiter precondition failed, e.g. a cell mean left the realizable set.
class LimiterError : public Error {
public:
  using Error::Error;
};

/// Output could not be written.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace m1dg
