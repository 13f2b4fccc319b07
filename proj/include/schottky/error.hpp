#pragma once

#include <stdexcept>
#include <string>

namespace schottky {

enum class ErrorCode {
  // Input validation.
  InvalidArgument,
  DisjointnessViolation,
  DegenerateRadius,
  LetterOutOfRange,
  TauNonPositive,
  MismatchedTerminalLetter,
  HypothesisViolated,
  ExhaustiveTooLarge,
  CapExceeded,
  OutsideDisk,
  ConvergenceRegionViolated,
  InvalidGroup,
  Io,
  // Numerical failures.
  PoleEvaluation,
  DepthExceeded,
  BranchCutHit,
  DegreeTooSmall,
  QuadratureNotConverged,
  SingularMatrix,
  BoundaryZeroSuspected,
  NonIntegerWinding,
  MaxDepthExceeded,
  NewtonDiverged,
  PerronViolation,
  NoSignChange,
};

enum class ErrorCategory { Validation, Numerical };

const char* to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace schottky
