#include "ohsent/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "jsonl.hpp"
#include "ohsent/parallel.hpp"

namespace ohsent {

using nlohmann::json;

std::string_view to_string(Mode m) { return m == Mode::Strict ? "strict" : "lenient"; }

std::optional<Mode> parse_mode(std::string_view text) {
  const std::string t = canonical_label(text);
  if (t == "strict") return Mode::Strict;
  if (t == "lenient") return Mode::Lenient;
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IOError, "read failed: " + path.string());
  return buf.str();
}

namespace {

std::string describe(const SentenceKey& k) {
  return k.doc_id + "/" + std::to_string(k.utterance_idx) + "/" + std::to_string(k.sentence_idx);
}

struct ParsedRecord {
  std::size_t line = 0;
  std::optional<SentenceKey> key;
  std::optional<std::size_t> model_index;
  std::string model_id;
  std::optional<HarmonizedPrediction> prediction;
  std::optional<std::string> text;
  std::optional<Finding> finding;
};

ParsedRecord parse_record(const detail::Line& line, const Roster& roster) {
  ParsedRecord rec;
  rec.line = line.number;
  auto fail = [&](ErrorCode code, std::string message) {
    rec.finding = Finding{code, std::move(message), {line.number}, rec.key, rec.model_id};
    return rec;
  };

  json obj = json::parse(line.text, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) return fail(ErrorCode::SchemaError, "malformed JSON record");
  if (!obj.is_object()) return fail(ErrorCode::SchemaError, "record is not an object");

  auto doc = detail::get_string(obj, "doc_id");
  if (!doc) return fail(ErrorCode::SchemaError, "missing or non-string field 'doc_id'");
  auto utt = detail::get_index(obj, "utt_idx");
  if (!utt) return fail(ErrorCode::SchemaError, "missing or invalid field 'utt_idx'");
  auto sent = detail::get_index(obj, "sent_idx");
  if (!sent) return fail(ErrorCode::SchemaError, "missing or invalid field 'sent_idx'");
  rec.key = SentenceKey{*doc, *utt, *sent};

  auto model = detail::get_string(obj, "model");
  if (!model) return fail(ErrorCode::SchemaError, "missing or non-string field 'model'");
  rec.model_id = *model;
  auto label = detail::get_string(obj, "label");
  if (!label) return fail(ErrorCode::SchemaError, "missing or non-string field 'label'");
  auto confidence = detail::get_number(obj, "confidence");
  if (!confidence) return fail(ErrorCode::SchemaError, "missing or non-numeric field 'confidence'");
  if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) return fail(ErrorCode::SchemaError, "field 'text' is not a string");
    rec.text = it->get<std::string>();
  }

  rec.model_index = roster.index_of(*model);
  if (!rec.model_index) return fail(ErrorCode::UnknownModel, "model '" + *model + "' is not in the roster");

  SentencePrediction raw{*rec.key, *model, *label, *confidence, rec.text};
  try {
    rec.prediction = harmonize(raw, roster[*rec.model_index]);
  } catch (const Error& e) {
    return fail(e.code(), e.message());
  }
  return rec;
}

struct Analysis {
  std::size_t records = 0;
  std::size_t keys = 0;
  std::size_t utterances = 0;
  std::size_t missing_cells = 0;
  std::vector<Finding> findings;
  std::vector<SentenceUnit> units;  // complete, valid units only
};

bool finding_less(const Finding& a, const Finding& b) {
  const std::size_t la = a.lines.empty() ? 0 : a.lines.front();
  const std::size_t lb = b.lines.empty() ? 0 : b.lines.front();
  return std::tie(la, a.code, a.model_id, a.message) < std::tie(lb, b.code, b.model_id, b.message);
}

Analysis analyze(std::string_view content, const Roster& roster, std::size_t workers) {
  const auto lines = detail::split_lines(content);
  std::vector<ParsedRecord> records(lines.size());
  parallel_for(lines.size(), workers, [&](std::size_t i) { records[i] = parse_record(lines[i], roster); });

  Analysis out;
  out.records = records.size();
  // key -> per roster model -> records (valid or not) naming that model
  std::map<SentenceKey, std::vector<std::vector<const ParsedRecord*>>> grouped;
  std::map<UtteranceKey, std::set<int64_t>> sentence_ids;

  for (const auto& rec : records) {
    if (rec.finding) out.findings.push_back(*rec.finding);
    if (!rec.key) continue;
    sentence_ids[utterance_of(*rec.key)].insert(rec.key->sentence_idx);
    if (!rec.model_index) continue;
    auto& slots = grouped[*rec.key];
    slots.resize(roster.size());
    slots[*rec.model_index].push_back(&rec);
  }

  for (const auto& [key, slots] : grouped) {
    std::vector<std::string> missing;
    std::vector<std::size_t> present_lines;
    bool complete_and_valid = true;
    for (std::size_t m = 0; m < roster.size(); ++m) {
      const auto& recs = slots[m];
      for (const auto* r : recs) present_lines.push_back(r->line);
      if (recs.empty()) {
        missing.push_back(roster[m].model_id);
        complete_and_valid = false;
      } else if (recs.size() > 1) {
        std::vector<std::size_t> dup_lines;
        for (const auto* r : recs) dup_lines.push_back(r->line);
        std::sort(dup_lines.begin(), dup_lines.end());
        out.findings.push_back({ErrorCode::DuplicateRecord,
                                "duplicate record for " + describe(key) + " model " + roster[m].model_id,
                                dup_lines, key, roster[m].model_id});
        complete_and_valid = false;
      } else if (!recs.front()->prediction) {
        complete_and_valid = false;
      }
    }
    out.missing_cells += missing.size();
    if (!missing.empty()) {
      std::sort(present_lines.begin(), present_lines.end());
      std::string names;
      for (const auto& n : missing) names += (names.empty() ? "" : ", ") + n;
      out.findings.push_back({ErrorCode::MissingModel,
                              "unit " + describe(key) + " lacks predictions from: " + names,
                              present_lines, key, missing.front()});
    }
    if (!complete_and_valid) continue;

    SentenceUnit unit{key, {}, std::nullopt};
    for (std::size_t m = 0; m < roster.size(); ++m) {
      const auto* r = slots[m].front();
      unit.predictions.push_back(*r->prediction);
      if (!unit.text && r->text) unit.text = r->text;
    }
    out.units.push_back(std::move(unit));
  }

  for (const auto& [utt, ids] : sentence_ids) {
    int64_t expected = 0;
    for (int64_t id : ids) {
      if (id != expected) {
        std::size_t first_line = 0;
        for (const auto& rec : records)
          if (rec.key && utterance_of(*rec.key) == utt) {
            first_line = rec.line;
            break;
          }
        out.findings.push_back({ErrorCode::NonContiguousSentences,
                                "utterance " + utt.doc_id + "/" + std::to_string(utt.utterance_idx) +
                                    " is missing sentence index " + std::to_string(expected),
                                {first_line}, std::nullopt, ""});
        break;
      }
      ++expected;
    }
  }

  std::set<SentenceKey> keys;
  for (const auto& rec : records)
    if (rec.key) keys.insert(*rec.key);
  out.keys = keys.size();
  out.utterances = sentence_ids.size();
  std::sort(out.findings.begin(), out.findings.end(), finding_less);
  return out;
}

}  // namespace

Dataset::Dataset(Roster roster, std::vector<SentenceUnit> sentences, std::vector<Finding> warnings,
                 std::size_t dropped_units)
    : roster_(std::move(roster)),
      sentences_(std::move(sentences)),
      warnings_(std::move(warnings)),
      dropped_units_(dropped_units) {
  std::sort(sentences_.begin(), sentences_.end(),
            [](const SentenceUnit& a, const SentenceUnit& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    const UtteranceKey k = utterance_of(sentences_[i].key);
    if (utterances_.empty() || utterances_.back().key != k) utterances_.push_back({k, i, 0});
    ++utterances_.back().count;
  }
}

const SentenceUnit* Dataset::find(const SentenceKey& key) const {
  auto it = std::lower_bound(sentences_.begin(), sentences_.end(), key,
                             [](const SentenceUnit& u, const SentenceKey& k) { return u.key < k; });
  if (it == sentences_.end() || it->key != key) return nullptr;
  return &*it;
}

std::optional<std::string> Dataset::utterance_text(const UtteranceSpan& span) const {
  std::string out;
  for (std::size_t i = span.first; i < span.first + span.count; ++i) {
    const auto& t = sentences_[i].text;
    if (!t) return std::nullopt;
    if (!out.empty()) out.push_back(' ');
    out += *t;
  }
  return out;
}

std::vector<Finding> validate_predictions(std::string_view content, const Roster& roster,
                                          std::size_t workers) {
  return analyze(content, roster, workers).findings;
}

ValidationReport validate_report(std::string_view content, const Roster& roster, std::size_t workers) {
  Analysis a = analyze(content, roster, workers);
  return {a.records, a.keys, a.utterances, roster.size(), a.missing_cells, std::move(a.findings)};
}

Dataset parse_predictions(std::string_view content, const Roster& roster, const LoadOptions& options) {
  Analysis a = analyze(content, roster, options.workers);

  for (const auto& f : a.findings) {
    const bool fatal = options.mode == Mode::Strict || (!f.key && f.code != ErrorCode::NonContiguousSentences);
    if (fatal) throw Error(f.code, f.message, f.lines.empty() ? std::nullopt : std::optional(f.lines.front()));
  }

  std::set<SentenceKey> dropped;
  for (const auto& f : a.findings)
    if (f.key) dropped.insert(*f.key);
  std::vector<SentenceUnit> kept;
  kept.reserve(a.units.size());
  for (auto& u : a.units)
    if (!dropped.count(u.key)) kept.push_back(std::move(u));
  if (kept.empty())
    throw Error(ErrorCode::EmptyInput, dropped.empty() ? "prediction file has no records"
                                                       : "every sentence unit was dropped");

  return Dataset(roster, std::move(kept), std::move(a.findings), dropped.size());
}

Dataset load_predictions(const std::filesystem::path& path, const Roster& roster,
                         const LoadOptions& options) {
  return parse_predictions(read_file(path), roster, options);
}

std::vector<EmotionPrediction> parse_emotions(std::string_view content) {
  std::vector<EmotionPrediction> out;
  std::map<std::tuple<UtteranceKey, int64_t>, std::size_t> seen;  // sentence -1 = utterance level
  for (const auto& line : detail::split_lines(content)) {
    auto fail = [&](ErrorCode code, const std::string& msg) { throw Error(code, msg, line.number); };
    json obj = json::parse(line.text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) fail(ErrorCode::SchemaError, "malformed JSON record");
    auto doc = detail::get_string(obj, "doc_id");
    if (!doc) fail(ErrorCode::SchemaError, "missing or non-string field 'doc_id'");
    auto utt = detail::get_index(obj, "utt_idx");
    if (!utt) fail(ErrorCode::SchemaError, "missing or invalid field 'utt_idx'");
    std::optional<int64_t> sent;
    if (auto it = obj.find("sent_idx"); it != obj.end() && !it->is_null()) {
      sent = detail::get_index(obj, "sent_idx");
      if (!sent) fail(ErrorCode::SchemaError, "invalid field 'sent_idx'");
    }
    auto emotion = detail::get_string(obj, "emotion");
    if (!emotion) fail(ErrorCode::SchemaError, "missing or non-string field 'emotion'");
    auto conf = detail::get_number(obj, "confidence");
    if (!conf) fail(ErrorCode::SchemaError, "missing or non-numeric field 'confidence'");
    if (!(*conf >= 0.0 && *conf <= 1.0))
      fail(ErrorCode::ConfidenceOutOfRange, "confidence outside [0, 1]");

    UtteranceKey key{*doc, *utt};
    auto [it, inserted] = seen.emplace(std::make_tuple(key, sent.value_or(-1)), line.number);
    if (!inserted)
      fail(ErrorCode::DuplicateRecord,
           "duplicate emotion record (first seen on line " + std::to_string(it->second) + ")");
    out.push_back({std::move(key), sent, canonical_label(*emotion), *conf, line.number});
  }
  return out;
}

std::vector<EmotionPrediction> load_emotions(const std::filesystem::path& path) {
  return parse_emotions(read_file(path));
}

}  // namespace ohsent
