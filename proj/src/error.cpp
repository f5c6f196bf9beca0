#include "matmean/error.hpp"

namespace matmean {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveResult: return "NonPositiveResult";
    case ErrorCode::SingularCongruence: return "SingularCongruence";
    case ErrorCode::WeightError: return "WeightError";
    case ErrorCode::MaxDepthExceeded: return "MaxDepthExceeded";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::InsufficientSteps: return "InsufficientSteps";
    case ErrorCode::UnstableEstimate: return "UnstableEstimate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace matmean
