#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace affect {

enum class ErrorCode {
  // input problems: unreadable files, bad config, malformed formats
  Io,
  Config,
  InvalidArgument,
  MalformedHeader,
  MalformedRow,
  CorruptModel,
  VersionMismatch,
  // data-validation problems: well-formed input that violates a data rule
  NonFiniteValue,
  EmptyChannel,
  UnknownLabel,
  NegativeDelay,
  RangeNotCovered,
  InsufficientCoverage,
  UnknownSession,
  DuplicateId,
  InvalidPercentile,
  CutoffAboveNyquist,
  SequenceTooShort,
  TooFewPeaks,
  AllFeaturesDropped,
  ClassTooSmall,
  MinorityTooSmall,
  EmptyMatrix,
  DegenerateRound,
  FeatureMismatch,
  LengthMismatch,
  F1Undefined,
  NonMonotoneTime,
  // a library invariant did not hold
  InternalInvariant,
};

enum class ErrorCategory { Input, DataValidation, Internal };

std::string_view to_string(ErrorCode code) noexcept;
std::string_view to_string(ErrorCategory category) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

/// Process exit status used by the command-line tool for each category.
int exit_status(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace affect
