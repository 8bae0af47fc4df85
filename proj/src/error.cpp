#include "affect/error.hpp"

namespace affect {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyChannel: return "EmptyChannel";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NegativeDelay: return "NegativeDelay";
    case ErrorCode::RangeNotCovered: return "RangeNotCovered";
    case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidPercentile: return "InvalidPercentile";
    case ErrorCode::CutoffAboveNyquist: return "CutoffAboveNyquist";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
    case ErrorCode::TooFewPeaks: return "TooFewPeaks";
    case ErrorCode::AllFeaturesDropped: return "AllFeaturesDropped";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::MinorityTooSmall: return "MinorityTooSmall";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DegenerateRound: return "DegenerateRound";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::F1Undefined: return "F1Undefined";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Input: return "input";
    case ErrorCategory::DataValidation: return "data_validation";
    case ErrorCategory::Internal: return "internal";
  }
  return "internal";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument:
    case ErrorCode::MalformedHeader:
    case ErrorCode::MalformedRow:
    case ErrorCode::CorruptModel:
    case ErrorCode::VersionMismatch:
      return ErrorCategory::Input;
    case ErrorCode::InternalInvariant:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::DataValidation;
  }
}

int exit_status(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Input: return 2;
    case ErrorCategory::DataValidation: return 3;
    case ErrorCategory::Internal: return 4;
  }
  return 4;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace affect
