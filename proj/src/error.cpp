#include "ohsent/error.hpp"

namespace ohsent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownNativeLabel: return "UnknownNativeLabel";
    case ErrorCode::NeutralFromBinary: return "NeutralFromBinary";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ErrorCode::NonContiguousSentences: return "NonContiguousSentences";
    case ErrorCode::EmptyUtterance: return "EmptyUtterance";
    case ErrorCode::MixedModels: return "MixedModels";
    case ErrorCode::WrongRosterSize: return "WrongRosterSize";
    case ErrorCode::MismatchedUnits: return "MismatchedUnits";
    case ErrorCode::UnanimousNeutral: return "UnanimousNeutral";
    case ErrorCode::MissingText: return "MissingText";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::WrongRaterCount: return "WrongRaterCount";
    case ErrorCode::MissingEmotionPrediction: return "MissingEmotionPrediction";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::optional<std::size_t>& line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line)), code_(code), line_(line), message_(message) {}

Error Error::with_stage(std::string stage) const {
  Error copy = *this;
  copy.stage_ = std::move(stage);
  return copy;
}

}  // namespace ohsent
