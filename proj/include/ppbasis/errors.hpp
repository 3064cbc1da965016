#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppbasis {

enum class ErrorCode {
  InvalidInput,
  InvalidInnerProduct,
  NotSubalgebra,
  DegenerateSpectrum,
  NonUnitalInclusion,
  InvalidPathPair,
  TraceMismatch,
  NotSupportedOnE1,
  NonConnected,
  NotABasis,
  NotASystem,
  InfeasibleSupport,
  NotAProjection,
  NotIntermediate,
  NotAnAction,
  NotUnitary,
  DuplicateCoset,
  NotRegular,
  IncompleteCosets,
  DegenerateCommutantModel,
  InvalidSubgroup,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidInnerProduct: return "InvalidInnerProduct";
    case ErrorCode::NotSubalgebra: return "NotSubalgebra";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NonUnitalInclusion: return "NonUnitalInclusion";
    case ErrorCode::InvalidPathPair: return "InvalidPathPair";
    case ErrorCode::TraceMismatch: return "TraceMismatch";
    case ErrorCode::NotSupportedOnE1: return "NotSupportedOnE1";
    case ErrorCode::NonConnected: return "NonConnected";
    case ErrorCode::NotABasis: return "NotABasis";
    case ErrorCode::NotASystem: return "NotASystem";
    case ErrorCode::InfeasibleSupport: return "InfeasibleSupport";
    case ErrorCode::NotAProjection: return "NotAProjection";
    case ErrorCode::NotIntermediate: return "NotIntermediate";
    case ErrorCode::NotAnAction: return "NotAnAction";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::DuplicateCoset: return "DuplicateCoset";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::IncompleteCosets: return "IncompleteCosets";
    case ErrorCode::DegenerateCommutantModel: return "DegenerateCommutantModel";
    case ErrorCode::InvalidSubgroup: return "InvalidSubgroup";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ppbasis
