#pragma once

#include <stdexcept>
#include <string>

#include "umlab/types.hpp"

namespace umlab {

enum class ErrorCode {
  InvalidArgument = 1,  // malformed input, unknown ids, size mismatches
  Domain = 2,           // point outside the domain of a map (xi = 0, p <= 1, ...)
  NonConvergence = 3,   // iterative solver gave up
  Budget = 4,           // quadrature / refinement budget exhausted
  Degenerate = 5,       // singular Hessian or Jacobian where regularity is required
  Hypothesis = 6,       // symbol does not satisfy the hypotheses of the growth theorem
  Io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorCode::InvalidArgument, w) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::Domain, w) {}
};

struct DegenerateError : Error {
  explicit DegenerateError(const std::string& w) : Error(ErrorCode::Degenerate, w) {}
};

struct HypothesisError : Error {
  explicit HypothesisError(const std::string& w) : Error(ErrorCode::Hypothesis, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::Io, w) {}
};

/// Newton-type solver failure; carries the last iterate and its residual.
struct NonConvergenceError : Error {
  NonConvergenceError(const std::string& w, Vec last, double residual)
      : Error(ErrorCode::NonConvergence, w), last_iterate(std::move(last)), residual(residual) {}
  Vec last_iterate;
  double residual;
};

/// Refinement budget exhausted; carries the best estimate and the gap between
/// the last two refinement levels.
struct BudgetError : Error {
  BudgetError(const std::string& w, Complex estimate, double gap)
      : Error(ErrorCode::Budget, w), estimate(estimate), gap(gap) {}
  Complex estimate;
  double gap;
};

}  // namespace umlab
