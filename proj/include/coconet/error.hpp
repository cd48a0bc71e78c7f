#pragma once

#include <stdexcept>
#include <string>

namespace coconet {

enum class ErrorCode {
  NegativeShareCount,
  SelfHolding,
  BadWeight,
  ColumnSumExceeded,
  NegativeCredit,
  NegativeThreshold,
  DimensionMismatch,
  TooManyBanks,
  SingularSystem,
  SingularIminusW,
  NegativeShift,
  NotSubFair,
  NotSuperFair,
  NoConvergence,
  BadConfig,
  InternalInvariantBroken,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeShareCount: return "NegativeShareCount";
    case ErrorCode::SelfHolding: return "SelfHolding";
    case ErrorCode::BadWeight: return "BadWeight";
    case ErrorCode::ColumnSumExceeded: return "ColumnSumExceeded";
    case ErrorCode::NegativeCredit: return "NegativeCredit";
    case ErrorCode::NegativeThreshold: return "NegativeThreshold";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooManyBanks: return "TooManyBanks";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SingularIminusW: return "SingularIminusW";
    case ErrorCode::NegativeShift: return "NegativeShift";
    case ErrorCode::NotSubFair: return "NotSubFair";
    case ErrorCode::NotSuperFair: return "NotSuperFair";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::InternalInvariantBroken: return "InternalInvariantBroken";
  }
  return "UnknownError";
}

/// All library failures surface as SolverError; code() is stable for
/// programmatic handling, what() carries the specific offending values.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coconet
