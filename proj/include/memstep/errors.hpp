#pragma once

#include <stdexcept>
#include <string>

namespace memstep {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (negative time, empty window).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Well-formed input that breaks a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Grid functions or operators living on different grids.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Quadratic form of an operator assumed symmetric positive (semi)definite came out negative.
class NotSpdError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Invalid run or scheme configuration. `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Sample times that do not fall on a time grid.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Raised when a caller-supplied cancellation predicate fires mid-run.
class Cancelled : public Error {
 public:
  Cancelled() : Error("run cancelled") {}
};

}  // namespace memstep
