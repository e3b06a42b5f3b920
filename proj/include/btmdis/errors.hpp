#pragma once

#include <stdexcept>
#include <string>

namespace btm {

enum class ErrorCode {
  Config,
  Io,
  Format,
  DimensionMismatch,
  NonFiniteValue,
  FullyUnknownColumn,
  InvalidConfig,
  InvalidCase,
  StepDiverged,
  EmptyCoefficients,
  EmptyPosterior,
  IndexOutOfRange,
  NumericalUnderflow,
  ZeroTruth,
  NonPositiveUncertainty,
  NegativeVariance,
  NonFinite,
  MissingData,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace btm
