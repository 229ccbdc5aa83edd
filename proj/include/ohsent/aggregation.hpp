#pragma once

#include <array>
#include <span>
#include <string>

#include "ohsent/corpus_model.hpp"

namespace ohsent {

/// Rules for reducing one model's sentence labels to an utterance label.
enum class AggregationRule {
  /// s(l) = (n_l / N) * meanConf(l), winner = argmax s(l).
  FrequencyWeightedConfidence,
};

struct UtteranceAggregate {
  UtteranceKey key;
  std::string model_id;
  std::array<double, 3> scores{};          // indexed by index_of(Polarity)
  std::array<std::size_t, 3> counts{};     // sentences per label
  std::array<double, 3> mean_confidence{};  // 0 for labels with no sentences
  Polarity winner = Polarity::Neutral;
  std::size_t n_sentences = 0;

  double score(Polarity p) const { return scores[index_of(p)]; }
  std::size_t count(Polarity p) const { return counts[index_of(p)]; }
};

/// Aggregates one model's predictions for one utterance.
///
/// meanConf(l) averages only the sentences predicted l, so a label with no
/// sentences scores exactly 0. Ties on score break by higher count, then
/// higher mean confidence, then lower numeric code.
///
/// Throws EmptyUtterance, MixedModels (several models) or MismatchedUnits
/// (several utterances).
UtteranceAggregate aggregate_utterance(
    std::span<const HarmonizedPrediction> preds,
    AggregationRule rule = AggregationRule::FrequencyWeightedConfidence);

}  // namespace ohsent
