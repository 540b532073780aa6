#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace framecl {

enum class ErrorCode {
  UnknownFrame,
  UnknownExample,
  UnknownSentence,
  MissingFrameFile,
  OffsetOutOfBounds,
  EmptyStore,
  SchemaVersionMismatch,
  ValidationFailure,
  InsufficientExamples,
  NOutOfRange,
  ShotFrameMismatch,
  BudgetExceeded,
  ConfigError,
  AuthError,
  RateLimited,
  TransportError,
  ProviderRefusal,
  ProviderExhausted,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Process exit code for the CLI: 2 config, 3 provider, 4 budget, 1 other.
  int exit_code() const {
    switch (code_) {
      case ErrorCode::ConfigError:
      case ErrorCode::ValidationFailure:
      case ErrorCode::SchemaVersionMismatch:
      case ErrorCode::UnknownFrame:
      case ErrorCode::UnknownExample:
      case ErrorCode::InsufficientExamples:
      case ErrorCode::NOutOfRange:
      case ErrorCode::ShotFrameMismatch:
        return 2;
      case ErrorCode::AuthError:
      case ErrorCode::RateLimited:
      case ErrorCode::TransportError:
      case ErrorCode::ProviderRefusal:
      case ErrorCode::ProviderExhausted:
        return 3;
      case ErrorCode::BudgetExceeded:
        return 4;
      default:
        return 1;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace framecl
