#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ordstat {

enum class ErrorCode {
  ShapeMismatch,
  EmptyTuple,
  MissingOutcome,
  InvalidTrial,
  InvalidPFunction,
  ScaleBelowOne,
  ROutOfRange,
  EpsOutOfRange,
  UnknownOutcome,
  DuplicateObservations,
  InvalidSample,
  DegenerateSpread,
  InvalidCascade,
  TCascadeNotExact,
  SizeLimit,
  ParseError,
  UnknownDemo,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyTuple: return "EmptyTuple";
    case ErrorCode::MissingOutcome: return "MissingOutcome";
    case ErrorCode::InvalidTrial: return "InvalidTrial";
    case ErrorCode::InvalidPFunction: return "InvalidPFunction";
    case ErrorCode::ScaleBelowOne: return "ScaleBelowOne";
    case ErrorCode::ROutOfRange: return "ROutOfRange";
    case ErrorCode::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorCode::UnknownOutcome: return "UnknownOutcome";
    case ErrorCode::DuplicateObservations: return "DuplicateObservations";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::DegenerateSpread: return "DegenerateSpread";
    case ErrorCode::InvalidCascade: return "InvalidCascade";
    case ErrorCode::TCascadeNotExact: return "TCascadeNotExact";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownDemo: return "UnknownDemo";
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

}  // namespace ordstat
