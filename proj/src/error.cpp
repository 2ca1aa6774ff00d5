#include "hpsens/error.hpp"

namespace hps {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::UnknownAxisValue: return "UnknownAxisValue";
    case ErrorKind::DuplicateRun: return "DuplicateRun";
    case ErrorKind::EmptyCurve: return "EmptyCurve";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateNormalization: return "DegenerateNormalization";
    case ErrorKind::TooFewCells: return "TooFewCells";
    case ErrorKind::MissingEnvNorm: return "MissingEnvNorm";
    case ErrorKind::NoRetainedSettings: return "NoRetainedSettings";
    case ErrorKind::NoEligibleSetting: return "NoEligibleSetting";
    case ErrorKind::NoFeasibleSetting: return "NoFeasibleSetting";
    case ErrorKind::TooManyAxes: return "TooManyAxes";
    case ErrorKind::EmptySamples: return "EmptySamples";
    case ErrorKind::ReplicateFailure: return "ReplicateFailure";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::TooFewReturns: return "TooFewReturns";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::IoFailure:
    case ErrorKind::MalformedRow:
    case ErrorKind::UnknownAxisValue:
    case ErrorKind::DuplicateRun:
    case ErrorKind::EmptyCurve:
    case ErrorKind::WindowTooLarge:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::TooLarge:
      return true;
    default:
      return false;
  }
}

}  // namespace hps
