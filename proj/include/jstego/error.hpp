#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jstego {

enum class ErrorCode {
  DegenerateInput,
  NoConvergence,
  SingularWeights,
  NoUniqueAxis,
  BelowThreshold,
  DimensionMismatch,
  EmbedRejected,
  ChecksumMismatch,
  IndexInvalid,
  ZeroVector,
  DuplicateIndex,
  InvalidPlaintext,
  ParamMismatch,
  ParseError,
  VersionMismatch,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` is the
// machine-readable part, `what()` carries "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularWeights: return "SingularWeights";
    case ErrorCode::NoUniqueAxis: return "NoUniqueAxis";
    case ErrorCode::BelowThreshold: return "BelowThreshold";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmbedRejected: return "EmbedRejected";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::IndexInvalid: return "IndexInvalid";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::InvalidPlaintext: return "InvalidPlaintext";
    case ErrorCode::ParamMismatch: return "ParamMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace jstego
