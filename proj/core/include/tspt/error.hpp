#pragma once

#include <stdexcept>
#include <string>

namespace tspt {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteValue,
  TooFewRows,
  SingularCovariance,
  BandwidthTooLarge,
  NotSymmetric,
  ZeroVariance,
  ExhaustiveTooLarge,
  InvalidPermutation,
  NonMonotoneTrend,
  EmptyInput,
  FileNotFound,
  ParseError,
  MissingColumn,
  InvalidConfig,
};

/// Coarse classification used to map failures onto process exit codes.
enum class ErrorKind { Usage, Data, Numerical };

const char* to_string(ErrorCode code) noexcept;
ErrorKind kind_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  /// Same error with trailing context, without repeating the code prefix.
  static Error with_context(const Error& base, const std::string& context) {
    return Error(Preformatted{}, base.code_, std::string(base.what()) + " (" + context + ")");
  }

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  struct Preformatted {};
  Error(Preformatted, ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NonFiniteValue: return "NON_FINITE_VALUE";
    case ErrorCode::TooFewRows: return "TOO_FEW_ROWS";
    case ErrorCode::SingularCovariance: return "SINGULAR_COVARIANCE";
    case ErrorCode::BandwidthTooLarge: return "BANDWIDTH_TOO_LARGE";
    case ErrorCode::NotSymmetric: return "NOT_SYMMETRIC";
    case ErrorCode::ZeroVariance: return "ZERO_VARIANCE";
    case ErrorCode::ExhaustiveTooLarge: return "EXHAUSTIVE_TOO_LARGE";
    case ErrorCode::InvalidPermutation: return "INVALID_PERMUTATION";
    case ErrorCode::NonMonotoneTrend: return "NON_MONOTONE_TREND";
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::FileNotFound: return "FILE_NOT_FOUND";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::MissingColumn: return "MISSING_COLUMN";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
  }
  return "UNKNOWN_ERROR";
}

inline ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::TooFewRows:
    case ErrorCode::NonMonotoneTrend:
    case ErrorCode::EmptyInput:
    case ErrorCode::FileNotFound:
    case ErrorCode::ParseError:
    case ErrorCode::MissingColumn:
      return ErrorKind::Data;
    case ErrorCode::InvalidConfig:
      return ErrorKind::Usage;
    case ErrorCode::SingularCovariance:
    case ErrorCode::BandwidthTooLarge:
    case ErrorCode::NotSymmetric:
    case ErrorCode::ZeroVariance:
    case ErrorCode::ExhaustiveTooLarge:
    case ErrorCode::InvalidPermutation:
      return ErrorKind::Numerical;
  }
  return ErrorKind::Numerical;
}

}  // namespace tspt
