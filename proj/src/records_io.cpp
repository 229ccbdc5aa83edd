#include "ohsent/records_io.hpp"

#include <fstream>
#include <map>

#include "jsonl.hpp"
#include "ohsent/error.hpp"
#include "ohsent/rng.hpp"

namespace ohsent {

using nlohmann::json;

namespace {

json per_label(const std::array<double, 3>& values) {
  json out = json::object();
  for (Polarity p : kPolarities) out[std::string(to_string(p))] = values[index_of(p)];
  return out;
}

json per_label(const std::array<std::size_t, 3>& values) {
  json out = json::object();
  for (Polarity p : kPolarities) out[std::string(to_string(p))] = values[index_of(p)];
  return out;
}

[[noreturn]] void schema_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SchemaError, what, line);
}

json parse_object(const detail::Line& line) {
  json obj = json::parse(line.text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) schema_fail(line.number, "malformed JSON record");
  return obj;
}

Polarity polarity_field(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number_integer()) schema_fail(line, std::string("missing field '") + field + "'");
  try {
    return polarity_from_code(it->get<int>());
  } catch (const Error& e) {
    schema_fail(line, e.message());
  }
}

template <typename T>
std::array<T, 3> label_map(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_object()) schema_fail(line, std::string("missing field '") + field + "'");
  std::array<T, 3> out{};
  for (Polarity p : kPolarities) {
    auto v = it->find(std::string(to_string(p)));
    if (v == it->end() || !v->is_number()) schema_fail(line, std::string("incomplete map '") + field + "'");
    out[index_of(p)] = v->get<T>();
  }
  return out;
}

UtteranceKey utterance_key(const json& obj, std::size_t line) {
  auto doc = detail::get_string(obj, "doc_id");
  auto utt = detail::get_index(obj, "utt_idx");
  if (!doc || !utt) schema_fail(line, "missing unit key");
  return {*doc, *utt};
}

json unit_json(const UnitRef& u) {
  json out = {{"doc_id", u.utterance.doc_id}, {"utt_idx", u.utterance.utterance_idx}};
  if (u.sentence_idx) out["sent_idx"] = *u.sentence_idx;
  return out;
}

}  // namespace

std::string serialize_aggregates(const std::vector<std::vector<UtteranceAggregate>>& aggregates) {
  std::string out;
  for (const auto& group : aggregates)
    for (const auto& a : group) {
      json obj = {{"doc_id", a.key.doc_id},
                  {"utt_idx", a.key.utterance_idx},
                  {"model", a.model_id},
                  {"n_sentences", a.n_sentences},
                  {"counts", per_label(a.counts)},
                  {"mean_confidence", per_label(a.mean_confidence)},
                  {"scores", per_label(a.scores)},
                  {"winner", code_of(a.winner)}};
      out += obj.dump();
      out += '\n';
    }
  return out;
}

std::vector<std::vector<UtteranceAggregate>> parse_aggregates(std::string_view content,
                                                              const Roster& roster) {
  std::map<UtteranceKey, std::vector<std::optional<UtteranceAggregate>>> grouped;
  for (const auto& line : detail::split_lines(content)) {
    const json obj = parse_object(line);
    UtteranceAggregate a;
    a.key = utterance_key(obj, line.number);
    auto model = detail::get_string(obj, "model");
    auto n = detail::get_index(obj, "n_sentences");
    if (!model || !n) schema_fail(line.number, "missing 'model' or 'n_sentences'");
    a.model_id = *model;
    a.n_sentences = static_cast<std::size_t>(*n);
    a.counts = label_map<std::size_t>(obj, "counts", line.number);
    a.mean_confidence = label_map<double>(obj, "mean_confidence", line.number);
    a.scores = label_map<double>(obj, "scores", line.number);
    a.winner = polarity_field(obj, "winner", line.number);

    auto m = roster.index_of(a.model_id);
    if (!m) throw Error(ErrorCode::UnknownModel, "model '" + a.model_id + "' is not in the roster", line.number);
    auto& slots = grouped[a.key];
    slots.resize(roster.size());
    if (slots[*m]) throw Error(ErrorCode::DuplicateRecord, "duplicate aggregate", line.number);
    slots[*m] = std::move(a);
  }
  std::vector<std::vector<UtteranceAggregate>> out;
  for (auto& [key, slots] : grouped) {
    std::vector<UtteranceAggregate> group;
    for (std::size_t m = 0; m < slots.size(); ++m) {
      if (!slots[m])
        throw Error(ErrorCode::MissingModel, "no aggregate for " + key.doc_id + "/" +
                                                 std::to_string(key.utterance_idx) + " model " +
                                                 roster[m].model_id);
      group.push_back(std::move(*slots[m]));
    }
    out.push_back(std::move(group));
  }
  return out;
}

std::string serialize_consensus(std::span<const ConsensusRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json labels = json::object();
    for (std::size_t i = 0; i < r.model_ids.size(); ++i) labels[r.model_ids[i]] = code_of(r.labels[i]);
    json obj = {{"doc_id", r.utterance.doc_id},
                {"utt_idx", r.utterance.utterance_idx},
                {"level", to_string(r.level)},
                {"labels", labels},
                {"consensus", code_of(r.consensus)},
                {"resolution", to_string(r.resolution)},
                {"stratum", to_string(classify_stratum(r))}};
    if (r.sentence_idx) obj["sent_idx"] = *r.sentence_idx;
    if (!r.confidences.empty()) {
      json conf = json::object();
      for (std::size_t i = 0; i < r.model_ids.size(); ++i) conf[r.model_ids[i]] = r.confidences[i];
      obj["confidences"] = conf;
    }
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<ConsensusRecord> parse_consensus(std::string_view content, const Roster& roster) {
  std::vector<ConsensusRecord> out;
  for (const auto& line : detail::split_lines(content)) {
    const json obj = parse_object(line);
    ConsensusRecord r;
    r.utterance = utterance_key(obj, line.number);
    auto level = detail::get_string(obj, "level");
    if (!level || !parse_level(*level)) schema_fail(line.number, "missing or invalid 'level'");
    r.level = *parse_level(*level);
    if (r.level == Level::Sentence) {
      r.sentence_idx = detail::get_index(obj, "sent_idx");
      if (!r.sentence_idx) schema_fail(line.number, "sentence record without 'sent_idx'");
    }
    auto resolution = detail::get_string(obj, "resolution");
    if (!resolution || !parse_resolution(*resolution)) schema_fail(line.number, "missing or invalid 'resolution'");
    r.resolution = *parse_resolution(*resolution);
    r.consensus = polarity_field(obj, "consensus", line.number);

    auto labels = obj.find("labels");
    if (labels == obj.end() || !labels->is_object()) schema_fail(line.number, "missing field 'labels'");
    if (labels->size() != roster.size())
      throw Error(ErrorCode::MissingModel, "labels do not cover the roster", line.number);
    auto confidences = obj.find("confidences");
    const bool has_conf = confidences != obj.end() && confidences->is_object();
    for (const auto& spec : roster.models()) {
      r.model_ids.push_back(spec.model_id);
      if (!labels->contains(spec.model_id))
        throw Error(ErrorCode::MissingModel, "no label for model " + spec.model_id, line.number);
      r.labels.push_back(polarity_field(*labels, spec.model_id.c_str(), line.number));
      if (has_conf) {
        auto c = detail::get_number(*confidences, spec.model_id.c_str());
        if (!c) schema_fail(line.number, "no confidence for model " + spec.model_id);
        r.confidences.push_back(*c);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string serialize_manifests(std::span<const SampleManifest> manifests) {
  std::string out;
  for (const auto& m : manifests) {
    json drawn = json::array();
    for (const auto& u : m.drawn) drawn.push_back(unit_json(u));
    json obj = {{"level", to_string(m.level)},
                {"stratum", to_string(m.stratum)},
                {"requested", m.requested},
                {"eligible", m.eligible},
                {"drawn", drawn},
                {"shortfall", m.shortfall()},
                {"seed", m.seed},
                {"rng", Xoshiro256StarStar::kName},
                {"word_min", m.word_min},
                {"word_max", m.word_max}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<SampleManifest> parse_manifests(std::string_view content) {
  std::vector<SampleManifest> out;
  for (const auto& line : detail::split_lines(content)) {
    const json obj = parse_object(line);
    SampleManifest m;
    auto level = detail::get_string(obj, "level");
    auto stratum = detail::get_string(obj, "stratum");
    if (!level || !parse_level(*level)) schema_fail(line.number, "missing or invalid 'level'");
    if (!stratum || !parse_stratum(*stratum)) schema_fail(line.number, "missing or invalid 'stratum'");
    m.level = *parse_level(*level);
    m.stratum = *parse_stratum(*stratum);
    auto requested = detail::get_index(obj, "requested");
    auto eligible = detail::get_index(obj, "eligible");
    auto word_min = detail::get_index(obj, "word_min");
    auto word_max = detail::get_index(obj, "word_max");
    auto seed = obj.find("seed");
    if (!requested || !eligible || !word_min || !word_max || seed == obj.end() || !seed->is_number_unsigned())
      schema_fail(line.number, "incomplete manifest header");
    m.requested = static_cast<std::size_t>(*requested);
    m.eligible = static_cast<std::size_t>(*eligible);
    m.word_min = static_cast<std::size_t>(*word_min);
    m.word_max = static_cast<std::size_t>(*word_max);
    m.seed = seed->get<uint64_t>();
    auto drawn = obj.find("drawn");
    if (drawn == obj.end() || !drawn->is_array()) schema_fail(line.number, "missing field 'drawn'");
    for (const auto& u : *drawn) {
      if (!u.is_object()) schema_fail(line.number, "drawn unit is not an object");
      UnitRef ref{utterance_key(u, line.number), std::nullopt};
      if (u.contains("sent_idx")) {
        ref.sentence_idx = detail::get_index(u, "sent_idx");
        if (!ref.sentence_idx) schema_fail(line.number, "invalid 'sent_idx'");
      }
      m.drawn.push_back(std::move(ref));
    }
    out.push_back(std::move(m));
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IOError, "write failed: " + path.string());
}

}  // namespace ohsent
