#include "ohsent/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ohsent/error.hpp"

namespace ohsent {

namespace {

// Scores that tie in exact arithmetic need not tie in floating point: (1/N)*c
// and (2/N)*(2c/2) can differ in the last bit. Equality of scores and mean
// confidences is therefore judged with a relative tolerance far below any
// meaningful difference, so the documented tie-breaks actually apply.
bool nearly_equal(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

UtteranceAggregate frequency_weighted(std::span<const HarmonizedPrediction> preds) {
  UtteranceAggregate agg;
  agg.key = utterance_of(preds.front().key);
  agg.model_id = preds.front().model_id;
  agg.n_sentences = preds.size();

  // Summing each label's confidences in ascending order makes the result
  // bit-identical under any permutation of the sentences.
  std::array<std::vector<double>, 3> confs;
  for (const auto& p : preds) {
    ++agg.counts[index_of(p.label)];
    confs[index_of(p.label)].push_back(p.confidence);
  }
  std::array<double, 3> conf_sum{};
  for (std::size_t i = 0; i < 3; ++i) {
    std::sort(confs[i].begin(), confs[i].end());
    for (double c : confs[i]) conf_sum[i] += c;
  }
  const double n_total = static_cast<double>(agg.n_sentences);
  for (std::size_t i = 0; i < 3; ++i) {
    if (agg.counts[i] == 0) continue;
    const double n = static_cast<double>(agg.counts[i]);
    agg.mean_confidence[i] = conf_sum[i] / n;
    agg.scores[i] = (n / n_total) * agg.mean_confidence[i];
  }

  // kPolarities is in ascending code order, so only a strictly better label
  // replaces the incumbent and a full tie keeps the lower code.
  std::size_t best = index_of(kPolarities[0]);
  for (Polarity p : kPolarities) {
    const std::size_t i = index_of(p);
    if (!nearly_equal(agg.scores[i], agg.scores[best])) {
      if (agg.scores[i] > agg.scores[best]) best = i;
    } else if (agg.counts[i] != agg.counts[best]) {
      if (agg.counts[i] > agg.counts[best]) best = i;
    } else if (!nearly_equal(agg.mean_confidence[i], agg.mean_confidence[best]) &&
               agg.mean_confidence[i] > agg.mean_confidence[best]) {
      best = i;
    }
  }
  agg.winner = kPolarities[best];
  return agg;
}

}  // namespace

UtteranceAggregate aggregate_utterance(std::span<const HarmonizedPrediction> preds,
                                       AggregationRule rule) {
  if (preds.empty()) throw Error(ErrorCode::EmptyUtterance, "no sentence predictions to aggregate");
  const auto& first = preds.front();
  for (const auto& p : preds) {
    if (p.model_id != first.model_id)
      throw Error(ErrorCode::MixedModels,
                  "predictions from " + first.model_id + " and " + p.model_id + " in one aggregate");
    if (utterance_of(p.key) != utterance_of(first.key))
      throw Error(ErrorCode::MismatchedUnits, "predictions span several utterances");
  }
  switch (rule) {
    case AggregationRule::FrequencyWeightedConfidence:
      return frequency_weighted(preds);
  }
  throw Error(ErrorCode::ConfigError, "unknown aggregation rule");
}

}  // namespace ohsent
