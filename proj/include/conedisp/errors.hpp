#pragma once
#include <stdexcept>
#include <string>

namespace conedisp {

enum class ErrorCode {
  NonPositiveProfile,
  RangeTooCoarse,
  NotAsymptoticallyConical,
  TailViolation,
  OrderTooLarge,
  NonPositiveArgument,
  ConvergenceFailure,
  AnchorTooSmall,
  SingularBasis,
  StepSizeUnderflow,
  BlowupDetected,
  NoRoot,
  InvalidMode,
  NonConstantWronskian,
  WindowEmpty,
  IterationDiverged,
  InsufficientSamples,
  OutOfGrid,
  InvalidSigma,
  QuadratureNotConverged,
  NonMonotoneRefinement,
  BadFit,
  TooLarge,
  UnstableShooting,
  InvalidInput,
};

const char* to_string(ErrorCode c);

// Validation errors come from the caller's input; numerical ones mean a solver
// could not reach its tolerance.
bool is_numerical(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace conedisp
