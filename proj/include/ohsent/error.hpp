#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ohsent {

enum class ErrorCode {
  // corpus model
  UnknownNativeLabel,
  NeutralFromBinary,
  UnknownModel,
  // ingest
  EmptyText,
  SchemaError,
  DuplicateRecord,
  MissingModel,
  ConfidenceOutOfRange,
  NonContiguousSentences,
  // aggregation
  EmptyUtterance,
  MixedModels,
  // consensus
  WrongRosterSize,
  MismatchedUnits,
  // stratify
  UnanimousNeutral,
  MissingText,
  // agreement
  EmptyInput,
  WrongRaterCount,
  // report
  MissingEmotionPrediction,
  IOError,
  // configuration
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. Carries a machine-readable code and,
/// for input-file errors, the 1-based line number of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& line() const noexcept { return line_; }
  /// The message without the code and line prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

  /// Prefix describing which pipeline stage raised the error; empty if unset.
  const std::string& stage() const noexcept { return stage_; }
  Error with_stage(std::string stage) const;

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string message_;
  std::string stage_;
};

}  // namespace ohsent
