#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ohsent {

/// Shared three-way polarity space. The underlying value is the numeric code.
enum class Polarity : int8_t { Negative = -1, Neutral = 0, Positive = 1 };

inline constexpr std::array<Polarity, 3> kPolarities = {
    Polarity::Negative, Polarity::Neutral, Polarity::Positive};

constexpr int code_of(Polarity p) noexcept { return static_cast<int>(p); }

/// Dense index 0..2 in numeric-code order, for 3-slot tables.
constexpr std::size_t index_of(Polarity p) noexcept {
  return static_cast<std::size_t>(code_of(p) + 1);
}

/// Throws Error(SchemaError) for codes outside {-1, 0, 1}.
Polarity polarity_from_code(int code);

std::string_view to_string(Polarity p);

enum class LabelSpace { Binary, Ternary, FiveStar };

std::string_view to_string(LabelSpace s);
std::optional<LabelSpace> parse_label_space(std::string_view text);

struct ModelSpec {
  std::string model_id;
  LabelSpace label_space = LabelSpace::Ternary;
  bool neutral_capable = true;
  bool is_fallback = false;

  /// Native label strings this model may emit, in canonical lower-case form.
  std::vector<std::string> native_labels() const;
};

/// Ordered list of models. Position is only used for output ordering; model
/// identity is always by model_id.
class Roster {
 public:
  Roster() = default;
  /// Validates: non-empty, unique ids, label-space/neutral consistency and
  /// exactly one fallback. Throws Error(ConfigError).
  explicit Roster(std::vector<ModelSpec> models);

  std::span<const ModelSpec> models() const noexcept { return models_; }
  std::size_t size() const noexcept { return models_.size(); }
  const ModelSpec& operator[](std::size_t i) const { return models_[i]; }

  std::optional<std::size_t> index_of(std::string_view model_id) const;
  std::size_t fallback_index() const noexcept { return fallback_; }
  const ModelSpec& fallback() const { return models_[fallback_]; }

 private:
  std::vector<ModelSpec> models_;
  std::size_t fallback_ = 0;
};

struct SentenceKey {
  std::string doc_id;
  int64_t utterance_idx = 0;
  int64_t sentence_idx = 0;

  auto operator<=>(const SentenceKey&) const = default;
  bool operator==(const SentenceKey&) const = default;
};

struct UtteranceKey {
  std::string doc_id;
  int64_t utterance_idx = 0;

  auto operator<=>(const UtteranceKey&) const = default;
  bool operator==(const UtteranceKey&) const = default;
};

inline UtteranceKey utterance_of(const SentenceKey& k) {
  return {k.doc_id, k.utterance_idx};
}

struct SentencePrediction {
  SentenceKey key;
  std::string model_id;
  std::string native_label;
  double confidence = 0.0;
  std::optional<std::string> text;
};

struct HarmonizedPrediction {
  SentenceKey key;
  std::string model_id;
  Polarity label = Polarity::Neutral;
  double confidence = 0.0;
};

/// Maps a model's native label onto the three-way polarity space.
///
/// Native labels are compared case-insensitively after trimming. Five-star
/// ratings collapse as 1-2 -> Negative, 3 -> Neutral, 4-5 -> Positive; the
/// confidence is that of the winning star and is passed through unchanged.
///
/// Throws Error with UnknownNativeLabel, NeutralFromBinary, UnknownModel
/// (model_id mismatch) or ConfidenceOutOfRange.
HarmonizedPrediction harmonize(const SentencePrediction& pred, const ModelSpec& spec);

/// Lower-cased, whitespace-trimmed copy.
std::string canonical_label(std::string_view text);

}  // namespace ohsent
