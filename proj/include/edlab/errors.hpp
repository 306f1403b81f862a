#pragma once

#include <stdexcept>
#include <string>

namespace edlab {

// Stable machine-readable error codes; the CLI prints them as
// "error: <code>: <message>" and maps them to exit codes.
enum class ErrorCode {
  InvalidArgument,
  NoValidOrder,
  DegenerateProfile,
  CoverageFailure,
  InvalidSize,
  SizeMismatch,
  DecompositionFailure,
  InvalidMode,
  NonConvergence,
  WindowTooSmall,
  QuadratureFailure,
  EnvelopeViolation,
  ConfigError,
  VerificationFailure,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoValidOrder: return "NoValidOrder";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::CoverageFailure: return "CoverageFailure";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::InvalidMode: return "InvalidMode";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::EnvelopeViolation: return "EnvelopeViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::VerificationFailure: return "VerificationFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edlab
