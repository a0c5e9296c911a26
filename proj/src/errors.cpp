#include "conedisp/errors.hpp"

namespace conedisp {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveProfile: return "NonPositiveProfile";
    case ErrorCode::RangeTooCoarse: return "RangeTooCoarse";
    case ErrorCode::NotAsymptoticallyConical: return "NotAsymptoticallyConical";
    case ErrorCode::TailViolation: return "TailViolation";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::AnchorTooSmall: return "AnchorTooSmall";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::InvalidMode: return "InvalidMode";
    case ErrorCode::NonConstantWronskian: return "NonConstantWronskian";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::IterationDiverged: return "IterationDiverged";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::OutOfGrid: return "OutOfGrid";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::NonMonotoneRefinement: return "NonMonotoneRefinement";
    case ErrorCode::BadFit: return "BadFit";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnstableShooting: return "UnstableShooting";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::StepSizeUnderflow:
    case ErrorCode::BlowupDetected:
    case ErrorCode::NonConstantWronskian:
    case ErrorCode::IterationDiverged:
    case ErrorCode::QuadratureNotConverged:
    case ErrorCode::NonMonotoneRefinement:
    case ErrorCode::UnstableShooting:
    case ErrorCode::SingularBasis:
    case ErrorCode::AnchorTooSmall:
    case ErrorCode::BadFit:
      return true;
    default:
      return false;
  }
}

}  // namespace conedisp
