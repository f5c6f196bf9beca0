#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace matmean {

enum class ErrorCode {
  InvalidArgument,
  NotSquare,
  NotPositiveDefinite,
  DimensionMismatch,
  NonPositiveResult,
  SingularCongruence,
  WeightError,
  MaxDepthExceeded,
  MaxItersExceeded,
  InsufficientSteps,
  UnstableEstimate,
  ParseError,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

/// Base exception for every failure raised by the library. The code is what
/// the C API maps to its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace matmean
