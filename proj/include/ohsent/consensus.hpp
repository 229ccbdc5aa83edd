#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ohsent/aggregation.hpp"
#include "ohsent/corpus_model.hpp"

namespace ohsent {

class Dataset;

enum class Level { Sentence, Utterance };
enum class Resolution { Majority, ConfidenceSplit, FallbackModel };

std::string_view to_string(Level l);
std::string_view to_string(Resolution r);
std::optional<Level> parse_level(std::string_view text);
std::optional<Resolution> parse_resolution(std::string_view text);

/// One model's vote on a sentence.
struct Vote {
  std::string model_id;
  Polarity label = Polarity::Neutral;
  double confidence = 0.0;
};

/// Ensemble label for one sentence or utterance. Per-model vectors are
/// parallel and follow the order the votes were supplied in.
struct ConsensusRecord {
  UtteranceKey utterance;
  std::optional<int64_t> sentence_idx;  // set iff level == Sentence
  Level level = Level::Sentence;
  std::vector<std::string> model_ids;
  std::vector<Polarity> labels;
  std::vector<double> confidences;  // sentence level only
  Polarity consensus = Polarity::Neutral;
  Resolution resolution = Resolution::Majority;

  std::optional<Polarity> label_of(std::string_view model_id) const;
};

/// Majority of three; a three-way split goes to the most confident model, and
/// an exact tie for the top confidence goes to the fallback model.
/// Throws WrongRosterSize or UnknownModel (fallback not among the votes).
ConsensusRecord triangulate_sentence(const SentenceKey& key, std::span<const Vote> votes,
                                     std::string_view fallback_model);

/// Majority of the three aggregated labels; a three-way split goes to the
/// fallback model. Sentence confidences are never consulted here.
/// Throws WrongRosterSize, MismatchedUnits or UnknownModel.
ConsensusRecord triangulate_utterance(std::span<const UtteranceAggregate> aggregates,
                                      std::string_view fallback_model);

struct TriangulationResult {
  /// aggregates[u][m]: utterance u (dataset order), roster model m.
  std::vector<std::vector<UtteranceAggregate>> aggregates;
  std::vector<ConsensusRecord> sentences;
  std::vector<ConsensusRecord> utterances;
};

/// Per-model utterance aggregation for every utterance of the dataset.
std::vector<std::vector<UtteranceAggregate>> aggregate_dataset(const Dataset& dataset,
                                                               std::size_t workers = 1);

/// Sentence consensus for every unit plus utterance consensus from the
/// supplied aggregates (dataset utterance order, roster model order).
TriangulationResult triangulate_dataset(const Dataset& dataset,
                                        std::vector<std::vector<UtteranceAggregate>> aggregates,
                                        std::size_t workers = 1);
TriangulationResult triangulate_dataset(const Dataset& dataset, std::size_t workers = 1);

}  // namespace ohsent
