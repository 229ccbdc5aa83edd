#include "ohsent/corpus_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "ohsent/error.hpp"

namespace ohsent {

Polarity polarity_from_code(int code) {
  switch (code) {
    case -1: return Polarity::Negative;
    case 0: return Polarity::Neutral;
    case 1: return Polarity::Positive;
    default:
      throw Error(ErrorCode::SchemaError,
                  "polarity code must be -1, 0 or 1, got " + std::to_string(code));
  }
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
    case Polarity::Positive: return "positive";
  }
  return "?";
}

std::string_view to_string(LabelSpace s) {
  switch (s) {
    case LabelSpace::Binary: return "binary";
    case LabelSpace::Ternary: return "ternary";
    case LabelSpace::FiveStar: return "five_star";
  }
  return "?";
}

std::optional<LabelSpace> parse_label_space(std::string_view text) {
  const std::string t = canonical_label(text);
  if (t == "binary") return LabelSpace::Binary;
  if (t == "ternary") return LabelSpace::Ternary;
  if (t == "five_star" || t == "fivestar") return LabelSpace::FiveStar;
  return std::nullopt;
}

std::string canonical_label(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> ModelSpec::native_labels() const {
  switch (label_space) {
    case LabelSpace::Binary: return {"negative", "positive"};
    case LabelSpace::Ternary: return {"negative", "neutral", "positive"};
    case LabelSpace::FiveStar: return {"1", "2", "3", "4", "5"};
  }
  return {};
}

Roster::Roster(std::vector<ModelSpec> models) : models_(std::move(models)) {
  if (models_.empty()) throw Error(ErrorCode::ConfigError, "roster is empty");
  std::set<std::string> seen;
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const ModelSpec& m = models_[i];
    if (m.model_id.empty()) throw Error(ErrorCode::ConfigError, "roster entry with empty model_id");
    if (!seen.insert(m.model_id).second)
      throw Error(ErrorCode::ConfigError, "duplicate model_id in roster: " + m.model_id);
    const bool expect_neutral = m.label_space != LabelSpace::Binary;
    if (m.neutral_capable != expect_neutral)
      throw Error(ErrorCode::ConfigError,
                  "model " + m.model_id + ": neutral_capable inconsistent with label space " +
                      std::string(to_string(m.label_space)));
    if (m.is_fallback) {
      ++fallbacks;
      fallback_ = i;
    }
  }
  if (fallbacks != 1)
    throw Error(ErrorCode::ConfigError,
                "roster must declare exactly one fallback model, found " + std::to_string(fallbacks));
}

std::optional<std::size_t> Roster::index_of(std::string_view model_id) const {
  for (std::size_t i = 0; i < models_.size(); ++i)
    if (models_[i].model_id == model_id) return i;
  return std::nullopt;
}

namespace {

Polarity map_polar_name(const std::string& label) {
  if (label == "negative") return Polarity::Negative;
  if (label == "neutral") return Polarity::Neutral;
  return Polarity::Positive;
}

}  // namespace

HarmonizedPrediction harmonize(const SentencePrediction& pred, const ModelSpec& spec) {
  if (pred.model_id != spec.model_id)
    throw Error(ErrorCode::UnknownModel,
                "prediction from " + pred.model_id + " harmonized with spec for " + spec.model_id);
  if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0))
    throw Error(ErrorCode::ConfidenceOutOfRange,
                "confidence " + std::to_string(pred.confidence) + " outside [0, 1]");

  const std::string label = canonical_label(pred.native_label);
  HarmonizedPrediction out{pred.key, pred.model_id, Polarity::Neutral, pred.confidence};

  switch (spec.label_space) {
    case LabelSpace::FiveStar: {
      if (label.size() != 1 || label[0] < '1' || label[0] > '5')
        throw Error(ErrorCode::UnknownNativeLabel,
                    "model " + spec.model_id + " expects a star rating 1-5, got '" +
                        pred.native_label + "'");
      const int stars = label[0] - '0';
      out.label = stars <= 2 ? Polarity::Negative
                  : stars == 3 ? Polarity::Neutral
                               : Polarity::Positive;
      return out;
    }
    case LabelSpace::Ternary:
      if (label != "negative" && label != "neutral" && label != "positive")
        throw Error(ErrorCode::UnknownNativeLabel,
                    "model " + spec.model_id + " emitted unknown label '" + pred.native_label + "'");
      out.label = map_polar_name(label);
      return out;
    case LabelSpace::Binary:
      if (label == "neutral")
        throw Error(ErrorCode::NeutralFromBinary,
                    "binary model " + spec.model_id + " emitted a neutral label");
      if (label != "negative" && label != "positive")
        throw Error(ErrorCode::UnknownNativeLabel,
                    "model " + spec.model_id + " emitted unknown label '" + pred.native_label + "'");
      out.label = map_polar_name(label);
      return out;
  }
  throw Error(ErrorCode::UnknownNativeLabel, "unsupported label space");
}

}  // namespace ohsent
