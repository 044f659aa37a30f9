#pragma once

#include <stdexcept>
#include <string>

namespace locdens {

enum class ErrorCode {
  ok,
  domain,
  numeric,
  unsupported,
  degenerate_neighborhood,
  singular_covariance,
  nonpositive_density,
  solver,
  infeasible,
  parse,
  experiment,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ErrorCode code = ErrorCode::domain)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what, ErrorCode::domain) {}
};

//! Quadrature or other numerical procedure failed to reach its tolerance.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(what, ErrorCode::numeric), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(what, ErrorCode::unsupported) {}
};

//! All kernel weights at the query point vanished.
class DegenerateNeighborhoodError : public Error {
 public:
  explicit DegenerateNeighborhoodError(const std::string& what)
      : Error(what, ErrorCode::degenerate_neighborhood) {}
};

class SingularCovarianceError : public Error {
 public:
  SingularCovarianceError(const std::string& what, double min_eigenvalue)
      : Error(what, ErrorCode::singular_covariance), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class NonpositiveDensityError : public Error {
 public:
  explicit NonpositiveDensityError(const std::string& what)
      : Error(what, ErrorCode::nonpositive_density) {}
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what, ErrorCode::solver), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

//! The moment triple lies outside the range of the moment map.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(what, ErrorCode::infeasible) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")", ErrorCode::parse), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class ExperimentError : public Error {
 public:
  explicit ExperimentError(const std::string& what) : Error(what, ErrorCode::experiment) {}
};

}  // namespace locdens
