#include "hardyveto/error.hpp"

namespace hardyveto {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateObservables: return "DegenerateObservables";
    case ErrorCode::kNoHardyState: return "NoHardyState";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kInsufficientTestData: return "InsufficientTestData";
    case ErrorCode::kRatioUnreachable: return "RatioUnreachable";
    case ErrorCode::kListTooShort: return "ListTooShort";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kInsufficientRuns: return "InsufficientRuns";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace hardyveto
