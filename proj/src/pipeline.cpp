#include "ohsent/pipeline.hpp"

#include <json.hpp>

#include <cstdio>

#include "ohsent/error.hpp"
#include "ohsent/records_io.hpp"
#include "ohsent/rng.hpp"

namespace ohsent {

using nlohmann::json;

namespace {

[[noreturn]] void missing(const std::string& field) {
  throw Error(ErrorCode::ConfigError, "missing or invalid config field '" + field + "'");
}

std::size_t count_field(const json& obj, const char* field, const std::string& path, std::size_t fallback) {
  auto it = obj.find(field);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) missing(path + "." + field);
  return it->get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  }
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::vector<Level> parse_level_selection(std::string_view text) {
  if (text == "both") return {Level::Sentence, Level::Utterance};
  if (auto l = parse_level(text)) return {*l};
  throw Error(ErrorCode::ConfigError, "level must be sentence, utterance or both, got '" + std::string(text) + "'");
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::ConfigError, "config is not a JSON object");

  RunConfig cfg;
  cfg.config_hash = hex64(fnv1a64(json_text));

  auto roster = doc.find("roster");
  if (roster == doc.end() || !roster->is_array() || roster->empty()) missing("roster");
  std::vector<ModelSpec> models;
  for (std::size_t i = 0; i < roster->size(); ++i) {
    const json& m = (*roster)[i];
    const std::string where = "roster[" + std::to_string(i) + "]";
    if (!m.is_object()) missing(where);
    ModelSpec spec;
    if (!m.contains("model_id") || !m["model_id"].is_string()) missing(where + ".model_id");
    spec.model_id = m["model_id"].get<std::string>();
    if (!m.contains("label_space") || !m["label_space"].is_string()) missing(where + ".label_space");
    auto space = parse_label_space(m["label_space"].get<std::string>());
    if (!space) missing(where + ".label_space");
    spec.label_space = *space;
    spec.neutral_capable = spec.label_space != LabelSpace::Binary;
    if (m.contains("neutral_capable")) {
      if (!m["neutral_capable"].is_boolean()) missing(where + ".neutral_capable");
      spec.neutral_capable = m["neutral_capable"].get<bool>();
    }
    if (m.contains("fallback")) {
      if (!m["fallback"].is_boolean()) missing(where + ".fallback");
      spec.is_fallback = m["fallback"].get<bool>();
    }
    models.push_back(std::move(spec));
  }
  cfg.roster = Roster(std::move(models));

  if (auto it = doc.find("abbreviations"); it != doc.end()) {
    if (!it->is_array()) missing("abbreviations");
    cfg.abbreviations.clear();
    for (const auto& a : *it) {
      if (!a.is_string()) missing("abbreviations");
      cfg.abbreviations.push_back(a.get<std::string>());
    }
  }
  if (auto it = doc.find("mode"); it != doc.end()) {
    if (!it->is_string() || !parse_mode(it->get<std::string>())) missing("mode");
    cfg.mode = *parse_mode(it->get<std::string>());
  }
  if (auto it = doc.find("seed"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) missing("seed");
    cfg.seed = it->get<uint64_t>();
  }
  if (auto it = doc.find("sampling"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) missing("sampling");
    SamplingConfig s;
    s.sentence_per_stratum = count_field(*it, "sentence_per_stratum", "sampling", s.sentence_per_stratum);
    s.utterance_per_stratum = count_field(*it, "utterance_per_stratum", "sampling", s.utterance_per_stratum);
    s.word_min = count_field(*it, "word_min", "sampling", s.word_min);
    s.word_max = count_field(*it, "word_max", "sampling", s.word_max);
    if (s.word_min > s.word_max) missing("sampling.word_max");
    cfg.sampling = s;
  }
  if (auto it = doc.find("inputs"); it != doc.end()) {
    if (!it->is_object()) missing("inputs");
    auto path_field = [&](const char* field, std::filesystem::path& out) {
      if (auto p = it->find(field); p != it->end()) {
        if (!p->is_string()) missing(std::string("inputs.") + field);
        out = resolve(base_dir, p->get<std::string>());
      }
    };
    path_field("predictions", cfg.predictions);
    path_field("emotions", cfg.emotions);
    path_field("raw_text", cfg.raw_text);
  }
  if (auto it = doc.find("output_dir"); it != doc.end()) {
    if (!it->is_string()) missing("output_dir");
    cfg.output_dir = resolve(base_dir, it->get<std::string>());
  }
  if (auto it = doc.find("level"); it != doc.end()) {
    if (!it->is_string()) missing("level");
    cfg.levels = parse_level_selection(it->get<std::string>());
  }
  cfg.workers = count_field(doc, "workers", "", cfg.workers);
  if (cfg.workers == 0) missing("workers");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.message());
  }
  return parse_config(text, path.parent_path());
}

SamplingParams sampling_params(const RunConfig& config, Level level) {
  if (!config.sampling) missing("sampling");
  if (!config.seed) missing("seed");
  return {config.sampling->per_stratum(level), config.sampling->word_min, config.sampling->word_max,
          *config.seed};
}

std::vector<std::optional<std::string>> unit_texts(std::span<const ConsensusRecord> records,
                                                   const Dataset& dataset) {
  std::map<UtteranceKey, const UtteranceSpan*> spans;
  for (const auto& s : dataset.utterances()) spans.emplace(s.key, &s);
  std::vector<std::optional<std::string>> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.level == Level::Sentence) {
      const SentenceUnit* u = dataset.find({r.utterance.doc_id, r.utterance.utterance_idx, *r.sentence_idx});
      out.push_back(u ? u->text : std::nullopt);
    } else {
      auto it = spans.find(r.utterance);
      out.push_back(it == spans.end() ? std::nullopt : dataset.utterance_text(*it->second));
    }
  }
  return out;
}

std::vector<SampleManifest> sample_all(const RunConfig& config, std::span<const ConsensusRecord> records,
                                       const Dataset& dataset) {
  const auto texts = unit_texts(records, dataset);
  std::vector<SampleManifest> out;
  for (Level level : {Level::Sentence, Level::Utterance}) {
    if (std::find(config.levels.begin(), config.levels.end(), level) == config.levels.end()) continue;
    auto manifests = draw_sample(records, texts, level, sampling_params(config, level));
    out.insert(out.end(), manifests.begin(), manifests.end());
  }
  return out;
}

std::vector<ConsensusRecord> all_records(const TriangulationResult& tri) {
  std::vector<ConsensusRecord> out = tri.sentences;
  out.insert(out.end(), tri.utterances.begin(), tri.utterances.end());
  return out;
}

RunMetadata metadata_of(const RunConfig& config) {
  return {config.config_hash, config.seed, std::string(to_string(config.mode))};
}

std::string render_ingest_report(const Dataset& dataset, Mode mode) {
  json warnings = json::array();
  for (const auto& f : dataset.warnings())
    warnings.push_back({{"code", to_string(f.code)}, {"message", f.message}, {"lines", f.lines}});
  json doc = {{"mode", to_string(mode)},
              {"sentence_units", dataset.sentences().size()},
              {"utterances", dataset.utterances().size()},
              {"dropped_units", dataset.dropped_units()},
              {"warnings", warnings}};
  return doc.dump(2) + "\n";
}

PipelineResult run_pipeline(const RunConfig& config) {
  if (config.predictions.empty()) missing("inputs.predictions");
  if (config.output_dir.empty()) missing("output_dir");
  if (!config.emotions.empty() && !config.sampling) missing("sampling");
  if (config.sampling && !config.seed) missing("seed");

  const Dataset dataset = in_stage("ingest", [&] {
    return load_predictions(config.predictions, config.roster, {config.mode, config.workers});
  });
  auto aggregates = in_stage("aggregate", [&] { return aggregate_dataset(dataset, config.workers); });
  const TriangulationResult tri =
      in_stage("triangulate", [&] { return triangulate_dataset(dataset, std::move(aggregates), config.workers); });
  const std::vector<ConsensusRecord> records = all_records(tri);

  std::vector<SampleManifest> manifests;
  if (config.sampling) manifests = in_stage("sample", [&] { return sample_all(config, records, dataset); });
  std::optional<std::vector<EmotionPrediction>> emotions;
  if (!config.emotions.empty()) emotions = in_stage("emotions", [&] { return load_emotions(config.emotions); });

  ReportInputs inputs{records, manifests, std::nullopt};
  if (emotions) inputs.emotions = std::span<const EmotionPrediction>(*emotions);
  ReportBundle bundle = in_stage("report", [&] {
    return build_report(config.roster, metadata_of(config), config.levels, inputs, config.workers);
  });

  in_stage("write", [&] {
    write_file(config.output_dir / "ingest_report.json", render_ingest_report(dataset, config.mode));
    write_file(config.output_dir / "aggregates.jsonl", serialize_aggregates(tri.aggregates));
    write_file(config.output_dir / "consensus.jsonl", serialize_consensus(records));
    write_report(bundle, config.output_dir);
    return 0;
  });
  return {std::move(bundle), dataset.dropped_units(), dataset.warnings()};
}

}  // namespace ohsent
