#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hps {

enum class ErrorKind {
  // Input / configuration problems.
  InvalidArgument,
  IoFailure,
  MalformedRow,
  UnknownAxisValue,
  DuplicateRun,
  EmptyCurve,
  WindowTooLarge,
  DimensionMismatch,
  // Failures of the analysis itself on otherwise valid input.
  DegenerateNormalization,
  TooFewCells,
  MissingEnvNorm,
  NoRetainedSettings,
  NoEligibleSetting,
  NoFeasibleSetting,
  TooManyAxes,
  EmptySamples,
  ReplicateFailure,
  EmptyBatch,
  TooFewReturns,
  ZeroDenominator,
  TooLarge,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for kinds caused by bad input or flags rather than by the data
/// failing an analysis precondition.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hps
