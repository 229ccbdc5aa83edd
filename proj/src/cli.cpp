#include "ohsent/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <functional>
#include <iostream>

#include "ohsent/error.hpp"
#include "ohsent/pipeline.hpp"
#include "ohsent/records_io.hpp"

namespace ohsent {

using nlohmann::json;

namespace {

constexpr const char* kEnvPrefix = "OHSENT_";

struct Flags {
  std::string config;
  std::string input;
  std::string emotions;
  std::string out;
  std::string level;
  std::string mode;
  std::string aggregates;
  std::string consensus;
  std::string manifests;
  std::optional<uint64_t> seed;
  std::optional<std::size_t> workers;
};

std::string env_name(const std::string& flag) {
  std::string name = kEnvPrefix;
  for (char c : flag) name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return name;
}

void add_common(CLI::App* cmd, Flags& f, bool needs_config = true) {
  auto* config = cmd->add_option("--config", f.config, "Run configuration (JSON)")->envname(env_name("config"));
  if (needs_config) config->required();
  cmd->add_option("--input", f.input, "Prediction file (JSONL)")->envname(env_name("input"));
  cmd->add_option("--emotions", f.emotions, "Emotion prediction file (JSONL)")->envname(env_name("emotions"));
  cmd->add_option("--out", f.out, "Output directory")->envname(env_name("out"));
  cmd->add_option("--seed", f.seed, "Sampling seed")->envname(env_name("seed"));
  cmd->add_option("--level", f.level, "sentence | utterance | both")
      ->envname(env_name("level"))
      ->check(CLI::IsMember({"sentence", "utterance", "both"}));
  cmd->add_option("--mode", f.mode, "strict | lenient")
      ->envname(env_name("mode"))
      ->check(CLI::IsMember({"strict", "lenient"}));
  cmd->add_option("--workers", f.workers, "Worker threads")
      ->envname(env_name("workers"))
      ->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg = load_config(f.config);
  if (!f.input.empty()) cfg.predictions = f.input;
  if (!f.emotions.empty()) cfg.emotions = f.emotions;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.level.empty()) cfg.levels = parse_level_selection(f.level);
  if (!f.mode.empty()) cfg.mode = *parse_mode(f.mode);
  if (f.workers) cfg.workers = *f.workers;
  return cfg;
}

void require(const std::filesystem::path& p, const std::string& field) {
  if (p.empty()) throw Error(ErrorCode::ConfigError, "missing or invalid config field '" + field + "'");
}

Dataset ingest(const RunConfig& cfg) {
  require(cfg.predictions, "inputs.predictions");
  return load_predictions(cfg.predictions, cfg.roster, {cfg.mode, cfg.workers});
}

std::filesystem::path intermediate(const std::string& flag, const RunConfig& cfg, const char* name) {
  if (!flag.empty()) return flag;
  require(cfg.output_dir, "output_dir");
  return cfg.output_dir / name;
}

std::vector<ConsensusRecord> read_consensus(const Flags& f, const RunConfig& cfg) {
  return parse_consensus(read_file(intermediate(f.consensus, cfg, "consensus.jsonl")), cfg.roster);
}

json finding_json(const Finding& f) {
  json out = {{"code", to_string(f.code)}, {"message", f.message}, {"lines", f.lines}};
  if (f.key)
    out["key"] = {{"doc_id", f.key->doc_id}, {"utt_idx", f.key->utterance_idx}, {"sent_idx", f.key->sentence_idx}};
  if (!f.model_id.empty()) out["model"] = f.model_id;
  return out;
}

int cmd_validate(const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve_config(f);
  require(cfg.predictions, "inputs.predictions");
  ValidationReport report = validate_report(read_file(cfg.predictions), cfg.roster, cfg.workers);
  if (!cfg.emotions.empty()) {
    try {
      load_emotions(cfg.emotions);
    } catch (const Error& e) {
      std::vector<std::size_t> lines;
      if (e.line()) lines.push_back(*e.line());
      report.findings.push_back({e.code(), "emotions: " + e.message(), lines, std::nullopt, ""});
    }
  }
  json findings = json::array();
  bool fatal = false;
  for (const auto& finding : report.findings) {
    findings.push_back(finding_json(finding));
    if (cfg.mode == Mode::Strict || !finding.key) fatal = true;
  }
  json doc = {{"records", report.records},
              {"sentence_units", report.sentence_units},
              {"utterances", report.utterances},
              {"models", report.models},
              {"missing_cells", report.missing_cells},
              {"findings", findings}};
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (!cfg.output_dir.empty()) write_file(cfg.output_dir / "validation.json", text);
  return fatal ? kExitDataError : kExitOk;
}

int cmd_aggregate(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  require(cfg.output_dir, "output_dir");
  const Dataset dataset = ingest(cfg);
  write_file(cfg.output_dir / "ingest_report.json", render_ingest_report(dataset, cfg.mode));
  write_file(cfg.output_dir / "aggregates.jsonl", serialize_aggregates(aggregate_dataset(dataset, cfg.workers)));
  return kExitOk;
}

int cmd_triangulate(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  require(cfg.output_dir, "output_dir");
  const Dataset dataset = ingest(cfg);
  TriangulationResult tri;
  if (!f.aggregates.empty())
    tri = triangulate_dataset(dataset, parse_aggregates(read_file(f.aggregates), cfg.roster), cfg.workers);
  else
    tri = triangulate_dataset(dataset, cfg.workers);
  write_file(cfg.output_dir / "ingest_report.json", render_ingest_report(dataset, cfg.mode));
  write_file(cfg.output_dir / "consensus.jsonl", serialize_consensus(all_records(tri)));
  return kExitOk;
}

/// Builds a bundle from intermediate files and writes the selected outputs.
int write_selected(const RunConfig& cfg, const ReportBundle& bundle, const std::vector<std::string>& names) {
  require(cfg.output_dir, "output_dir");
  const auto files = render(bundle);
  for (const auto& name : names) {
    auto it = files.find(name);
    if (it != files.end()) write_file(cfg.output_dir / name, it->second);
  }
  return kExitOk;
}

int cmd_stratify(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  const auto records = read_consensus(f, cfg);
  const auto bundle = build_report(cfg.roster, metadata_of(cfg), cfg.levels, {records, {}, std::nullopt}, cfg.workers);
  return write_selected(cfg, bundle, {"strata.csv", "resolutions.csv"});
}

int cmd_agree(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  const auto records = read_consensus(f, cfg);
  const auto bundle = build_report(cfg.roster, metadata_of(cfg), cfg.levels, {records, {}, std::nullopt}, cfg.workers);
  return write_selected(cfg, bundle, {"agreement_pairwise.csv", "agreement_fleiss.csv", "confusion.csv"});
}

int cmd_sample(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  require(cfg.output_dir, "output_dir");
  const auto records = read_consensus(f, cfg);
  const Dataset dataset = ingest(cfg);
  write_file(cfg.output_dir / "manifests.jsonl", serialize_manifests(sample_all(cfg, records, dataset)));
  return kExitOk;
}

int cmd_emotions(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  require(cfg.output_dir, "output_dir");
  require(cfg.emotions, "inputs.emotions");
  const auto manifests = parse_manifests(read_file(intermediate(f.manifests, cfg, "manifests.jsonl")));
  const auto emotions = load_emotions(cfg.emotions);
  for (Level level : cfg.levels) {
    LevelReport lr;
    lr.level = level;
    for (const auto& m : manifests)
      if (m.level == level) lr.manifests.push_back(m);
    lr.emotions = emotion_profile(lr.manifests, emotions);
    const std::string name(to_string(level));
    write_file(cfg.output_dir / ("emotion_distribution_" + name + ".csv"), render_emotion_distribution(lr));
    write_file(cfg.output_dir / ("emotion_confidence_" + name + ".csv"), render_emotion_confidence(lr));
  }
  return kExitOk;
}

int cmd_report(const Flags& f, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  require(cfg.output_dir, "output_dir");
  const auto records = read_consensus(f, cfg);
  std::vector<SampleManifest> manifests;
  if (!f.manifests.empty()) manifests = parse_manifests(read_file(f.manifests));
  std::optional<std::vector<EmotionPrediction>> emotions;
  if (!cfg.emotions.empty()) {
    if (manifests.empty()) throw Error(ErrorCode::ConfigError, "emotion profiling needs --manifests");
    emotions = load_emotions(cfg.emotions);
  }
  ReportInputs inputs{records, manifests, std::nullopt};
  if (emotions) inputs.emotions = std::span<const EmotionPrediction>(*emotions);
  write_report(build_report(cfg.roster, metadata_of(cfg), cfg.levels, inputs, cfg.workers), cfg.output_dir);
  return kExitOk;
}

int cmd_run(const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve_config(f);
  const PipelineResult result = run_pipeline(cfg);
  out << "wrote report to " << cfg.output_dir.string() << "\n";
  if (result.dropped_units > 0) out << "dropped " << result.dropped_units << " incomplete or invalid unit(s)\n";
  return kExitOk;
}

int cmd_segment(const Flags& f, std::ostream& out) {
  std::vector<std::string> abbreviations = SentenceSegmenter::default_abbreviations();
  std::filesystem::path input = f.input;
  if (!f.config.empty()) {
    const RunConfig cfg = load_config(f.config);
    abbreviations = cfg.abbreviations;
    if (input.empty()) input = cfg.raw_text;
  }
  require(input, "inputs.raw_text");
  const SentenceSegmenter segmenter(abbreviations);
  std::string lines;
  std::size_t line_no = 0;
  const std::string content = read_file(input);
  for (std::string_view rest = content; !rest.empty();) {
    const std::size_t nl = rest.find('\n');
    const std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("doc_id") || !rec.contains("utt_idx") ||
        !rec.contains("text") || !rec["text"].is_string())
      throw Error(ErrorCode::SchemaError, "transcript records need doc_id, utt_idx and text", line_no);
    std::vector<std::string> sentences;
    try {
      sentences = segmenter.segment(rec["text"].get<std::string>());
    } catch (const Error& e) {
      throw Error(e.code(), e.message(), line_no);
    }
    for (std::size_t i = 0; i < sentences.size(); ++i)
      lines += json{{"doc_id", rec["doc_id"]}, {"utt_idx", rec["utt_idx"]}, {"sent_idx", i}, {"text", sentences[i]}}
                   .dump() +
               "\n";
  }
  if (f.out.empty())
    out << lines;
  else
    write_file(f.out, lines);
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentiment triangulation and agreement diagnostics for three-model ensembles", "ohsent"};
  app.require_subcommand(1);

  Flags flags;
  std::function<int(const Flags&, std::ostream&)> action;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Flags&, std::ostream&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->callback([&action, fn] { action = fn; });
    return cmd;
  };

  add_common(sub("validate", "Check prediction (and emotion) files without computing statistics", cmd_validate), flags);
  add_common(sub("aggregate", "Per-model utterance aggregation -> aggregates.jsonl", cmd_aggregate), flags);
  auto* tri = sub("triangulate", "Sentence and utterance consensus -> consensus.jsonl", cmd_triangulate);
  add_common(tri, flags);
  tri->add_option("--aggregates", flags.aggregates, "Precomputed aggregates.jsonl");
  for (auto [name, help, fn] : {std::tuple{"stratify", "ABC stratum prevalence -> strata.csv", &cmd_stratify},
                                std::tuple{"agree", "Kappa statistics and confusion matrices", &cmd_agree}}) {
    auto* cmd = sub(name, help, fn);
    add_common(cmd, flags);
    cmd->add_option("--consensus", flags.consensus, "consensus.jsonl (default: <out>/consensus.jsonl)");
  }
  auto* sample = sub("sample", "Seeded stratified samples -> manifests.jsonl", cmd_sample);
  add_common(sample, flags);
  sample->add_option("--consensus", flags.consensus, "consensus.jsonl (default: <out>/consensus.jsonl)");
  auto* emo = sub("emotions", "Emotion profiles per stratum -> heatmap grids", cmd_emotions);
  add_common(emo, flags);
  emo->add_option("--manifests", flags.manifests, "manifests.jsonl (default: <out>/manifests.jsonl)");
  auto* report = sub("report", "Full report bundle from intermediate files", cmd_report);
  add_common(report, flags);
  report->add_option("--consensus", flags.consensus, "consensus.jsonl (default: <out>/consensus.jsonl)");
  report->add_option("--manifests", flags.manifests, "manifests.jsonl for samples and emotion profiles");
  add_common(sub("run", "Run every stage and write the full report bundle", cmd_run), flags);
  add_common(sub("segment", "Split transcript utterances into sentences", cmd_segment), flags, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action(flags, out);
  } catch (const Error& e) {
    err << (e.stage().empty() ? "" : "[" + e.stage() + "] ") << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}

}  // namespace ohsent
