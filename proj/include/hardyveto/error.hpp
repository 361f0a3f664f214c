#pragma once

#include <stdexcept>
#include <string>

namespace hardyveto {

// Mirrors hv_status in hardyveto.h; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kDegenerateObservables = 3,
  kNoHardyState = 4,
  kTooLarge = 5,
  kInfeasible = 6,
  kUnbounded = 7,
  kInsufficientTestData = 8,
  kRatioUnreachable = 9,
  kListTooShort = 10,
  kEmptyMatrix = 11,
  kInsufficientRuns = 12,
  kParse = 13,
  kInternal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hardyveto
