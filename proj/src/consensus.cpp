#include "ohsent/consensus.hpp"

#include <algorithm>

#include "ohsent/error.hpp"
#include "ohsent/ingest.hpp"
#include "ohsent/parallel.hpp"

namespace ohsent {

std::string_view to_string(Level l) { return l == Level::Sentence ? "sentence" : "utterance"; }

std::string_view to_string(Resolution r) {
  switch (r) {
    case Resolution::Majority: return "majority";
    case Resolution::ConfidenceSplit: return "confidence_split";
    case Resolution::FallbackModel: return "fallback_model";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view text) {
  if (text == "sentence") return Level::Sentence;
  if (text == "utterance") return Level::Utterance;
  return std::nullopt;
}

std::optional<Resolution> parse_resolution(std::string_view text) {
  if (text == "majority") return Resolution::Majority;
  if (text == "confidence_split") return Resolution::ConfidenceSplit;
  if (text == "fallback_model") return Resolution::FallbackModel;
  return std::nullopt;
}

std::optional<Polarity> ConsensusRecord::label_of(std::string_view model_id) const {
  for (std::size_t i = 0; i < model_ids.size(); ++i)
    if (model_ids[i] == model_id) return labels[i];
  return std::nullopt;
}

namespace {

/// Label shared by at least two of three votes, if any.
std::optional<Polarity> majority_label(std::span<const Polarity> labels) {
  if (labels[0] == labels[1] || labels[0] == labels[2]) return labels[0];
  if (labels[1] == labels[2]) return labels[1];
  return std::nullopt;
}

std::size_t position_of(const std::vector<std::string>& ids, std::string_view model) {
  auto it = std::find(ids.begin(), ids.end(), model);
  if (it == ids.end())
    throw Error(ErrorCode::UnknownModel, "fallback model '" + std::string(model) + "' did not vote");
  return static_cast<std::size_t>(it - ids.begin());
}

}  // namespace

ConsensusRecord triangulate_sentence(const SentenceKey& key, std::span<const Vote> votes,
                                     std::string_view fallback_model) {
  if (votes.size() != 3)
    throw Error(ErrorCode::WrongRosterSize,
                "triangulation needs exactly 3 models, got " + std::to_string(votes.size()));
  ConsensusRecord rec;
  rec.utterance = utterance_of(key);
  rec.sentence_idx = key.sentence_idx;
  rec.level = Level::Sentence;
  for (const auto& v : votes) {
    rec.model_ids.push_back(v.model_id);
    rec.labels.push_back(v.label);
    rec.confidences.push_back(v.confidence);
  }
  const std::size_t fallback = position_of(rec.model_ids, fallback_model);

  if (auto m = majority_label(rec.labels)) {
    rec.consensus = *m;
    rec.resolution = Resolution::Majority;
    return rec;
  }
  const double top = *std::max_element(rec.confidences.begin(), rec.confidences.end());
  const auto n_top = std::count(rec.confidences.begin(), rec.confidences.end(), top);
  if (n_top == 1) {
    const auto pos = std::find(rec.confidences.begin(), rec.confidences.end(), top) - rec.confidences.begin();
    rec.consensus = rec.labels[static_cast<std::size_t>(pos)];
    rec.resolution = Resolution::ConfidenceSplit;
  } else {
    rec.consensus = rec.labels[fallback];
    rec.resolution = Resolution::FallbackModel;
  }
  return rec;
}

ConsensusRecord triangulate_utterance(std::span<const UtteranceAggregate> aggregates,
                                      std::string_view fallback_model) {
  if (aggregates.size() != 3)
    throw Error(ErrorCode::WrongRosterSize,
                "triangulation needs exactly 3 models, got " + std::to_string(aggregates.size()));
  ConsensusRecord rec;
  rec.utterance = aggregates.front().key;
  rec.level = Level::Utterance;
  for (const auto& a : aggregates) {
    if (a.key != rec.utterance)
      throw Error(ErrorCode::MismatchedUnits, "aggregates belong to different utterances");
    rec.model_ids.push_back(a.model_id);
    rec.labels.push_back(a.winner);
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (rec.model_ids[i] == rec.model_ids[j])
        throw Error(ErrorCode::MismatchedUnits, "two aggregates from model " + rec.model_ids[i]);
  const std::size_t fallback = position_of(rec.model_ids, fallback_model);

  if (auto m = majority_label(rec.labels)) {
    rec.consensus = *m;
    rec.resolution = Resolution::Majority;
  } else {
    rec.consensus = rec.labels[fallback];
    rec.resolution = Resolution::FallbackModel;
  }
  return rec;
}

std::vector<std::vector<UtteranceAggregate>> aggregate_dataset(const Dataset& dataset,
                                                               std::size_t workers) {
  const auto& spans = dataset.utterances();
  const auto& units = dataset.sentences();
  const std::size_t n_models = dataset.roster().size();
  std::vector<std::vector<UtteranceAggregate>> out(spans.size());
  parallel_for(spans.size(), workers, [&](std::size_t u) {
    const auto& span = spans[u];
    out[u].reserve(n_models);
    std::vector<HarmonizedPrediction> preds;
    preds.reserve(span.count);
    for (std::size_t m = 0; m < n_models; ++m) {
      preds.clear();
      for (std::size_t s = span.first; s < span.first + span.count; ++s)
        preds.push_back(units[s].predictions[m]);
      out[u].push_back(aggregate_utterance(preds));
    }
  });
  return out;
}

TriangulationResult triangulate_dataset(const Dataset& dataset,
                                        std::vector<std::vector<UtteranceAggregate>> aggregates,
                                        std::size_t workers) {
  const Roster& roster = dataset.roster();
  if (roster.size() != 3)
    throw Error(ErrorCode::WrongRosterSize,
                "triangulation needs exactly 3 models, roster has " + std::to_string(roster.size()));
  if (aggregates.size() != dataset.utterances().size())
    throw Error(ErrorCode::MismatchedUnits, "aggregate count does not match utterance count");
  const std::string fallback = roster.fallback().model_id;

  TriangulationResult result;
  const auto& units = dataset.sentences();
  result.sentences.resize(units.size());
  parallel_for(units.size(), workers, [&](std::size_t i) {
    std::vector<Vote> votes;
    for (const auto& p : units[i].predictions) votes.push_back({p.model_id, p.label, p.confidence});
    result.sentences[i] = triangulate_sentence(units[i].key, votes, fallback);
  });

  result.utterances.resize(aggregates.size());
  parallel_for(aggregates.size(), workers, [&](std::size_t u) {
    if (aggregates[u].empty() || aggregates[u].front().key != dataset.utterances()[u].key)
      throw Error(ErrorCode::MismatchedUnits, "aggregates out of order with dataset utterances");
    result.utterances[u] = triangulate_utterance(aggregates[u], fallback);
  });
  result.aggregates = std::move(aggregates);
  return result;
}

TriangulationResult triangulate_dataset(const Dataset& dataset, std::size_t workers) {
  return triangulate_dataset(dataset, aggregate_dataset(dataset, workers), workers);
}

}  // namespace ohsent
