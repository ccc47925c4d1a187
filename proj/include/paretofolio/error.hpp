#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace paretofolio {

enum class ErrorCode {
  FileNotFound,
  MalformedRow,
  EmptyFrame,
  TooFewRows,
  TooFewObservations,
  ZeroMarketVariance,
  KTooLarge,
  DimensionMismatch,
  ZeroVolatility,
  SolverFailure,
  UnevaluatedPoint,
  PopulationTooSmall,
  NoReferencePoints,
  NoDirections,
  InvalidConfig,
  SingularKernel,
  DegenerateBounds,
  MismatchedLengths,
  MissingTicker,
  EmptyWindow,
  WindowMismatch,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ZeroMarketVariance: return "ZeroMarketVariance";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVolatility: return "ZeroVolatility";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::UnevaluatedPoint: return "UnevaluatedPoint";
    case ErrorCode::PopulationTooSmall: return "PopulationTooSmall";
    case ErrorCode::NoReferencePoints: return "NoReferencePoints";
    case ErrorCode::NoDirections: return "NoDirections";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::DegenerateBounds: return "DegenerateBounds";
    case ErrorCode::MismatchedLengths: return "MismatchedLengths";
    case ErrorCode::MissingTicker: return "MissingTicker";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace paretofolio
