#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ohsent/corpus_model.hpp"
#include "ohsent/error.hpp"

namespace ohsent {

enum class Mode { Strict, Lenient };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view text);

/// One validation problem in an input file. `lines` are 1-based and sorted.
struct Finding {
  ErrorCode code;
  std::string message;
  std::vector<std::size_t> lines;
  std::optional<SentenceKey> key;  // unset when the record key could not be read
  std::string model_id;
};

/// All harmonized predictions for one sentence, in roster order.
struct SentenceUnit {
  SentenceKey key;
  std::vector<HarmonizedPrediction> predictions;
  std::optional<std::string> text;
};

/// Contiguous run of sentence units belonging to one utterance.
struct UtteranceSpan {
  UtteranceKey key;
  std::size_t first = 0;
  std::size_t count = 0;
};

struct LoadOptions {
  Mode mode = Mode::Strict;
  std::size_t workers = 1;
};

/// Indexed, read-only view of a prediction file. Sentence units are sorted by
/// key, so construction is independent of input line order.
class Dataset {
 public:
  Dataset(Roster roster, std::vector<SentenceUnit> sentences,
          std::vector<Finding> warnings, std::size_t dropped_units);

  const Roster& roster() const noexcept { return roster_; }
  const std::vector<SentenceUnit>& sentences() const noexcept { return sentences_; }
  const std::vector<UtteranceSpan>& utterances() const noexcept { return utterances_; }

  /// Findings tolerated in lenient mode (always empty in strict mode).
  const std::vector<Finding>& warnings() const noexcept { return warnings_; }
  std::size_t dropped_units() const noexcept { return dropped_units_; }

  const SentenceUnit* find(const SentenceKey& key) const;

  /// Sentence texts joined with single spaces; nullopt if any sentence lacks text.
  std::optional<std::string> utterance_text(const UtteranceSpan& span) const;

 private:
  Roster roster_;
  std::vector<SentenceUnit> sentences_;
  std::vector<UtteranceSpan> utterances_;
  std::vector<Finding> warnings_;
  std::size_t dropped_units_ = 0;
};

/// Reads a whole file; throws Error(IOError).
std::string read_file(const std::filesystem::path& path);

/// Every problem in a line-delimited prediction file, ordered by first line.
std::vector<Finding> validate_predictions(std::string_view content, const Roster& roster,
                                          std::size_t workers = 1);

struct ValidationReport {
  std::size_t records = 0;         // non-blank lines
  std::size_t sentence_units = 0;  // distinct readable sentence keys
  std::size_t utterances = 0;
  std::size_t models = 0;          // roster size
  std::size_t missing_cells = 0;   // (unit, roster model) pairs with no record
  std::vector<Finding> findings;
};

/// Schema and completeness check without computing any statistics.
ValidationReport validate_report(std::string_view content, const Roster& roster,
                                 std::size_t workers = 1);

/// Parses and harmonizes a prediction file.
///
/// Strict mode throws the first finding as an Error. Lenient mode drops every
/// sentence unit touched by a keyed finding and keeps going; findings without a
/// readable key (malformed lines) are fatal in both modes.
Dataset parse_predictions(std::string_view content, const Roster& roster,
                          const LoadOptions& options = {});
Dataset load_predictions(const std::filesystem::path& path, const Roster& roster,
                         const LoadOptions& options = {});

/// One emotion-probe output. sentence_idx unset means utterance level.
struct EmotionPrediction {
  UtteranceKey utterance;
  std::optional<int64_t> sentence_idx;
  std::string emotion;
  double confidence = 0.0;
  std::size_t line = 0;
};

/// Throws SchemaError, ConfidenceOutOfRange or DuplicateRecord with line numbers.
std::vector<EmotionPrediction> parse_emotions(std::string_view content);
std::vector<EmotionPrediction> load_emotions(const std::filesystem::path& path);

}  // namespace ohsent
