#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ohsent/consensus.hpp"
#include "ohsent/ingest.hpp"
#include "ohsent/report.hpp"
#include "ohsent/segment.hpp"
#include "ohsent/stratify.hpp"

namespace ohsent {

struct SamplingConfig {
  std::size_t sentence_per_stratum = 1000;
  std::size_t utterance_per_stratum = 500;
  std::size_t word_min = 10;
  std::size_t word_max = 350;

  std::size_t per_stratum(Level level) const {
    return level == Level::Sentence ? sentence_per_stratum : utterance_per_stratum;
  }
};

struct RunConfig {
  Roster roster;
  std::vector<std::string> abbreviations = SentenceSegmenter::default_abbreviations();
  Mode mode = Mode::Strict;
  std::optional<uint64_t> seed;
  std::optional<SamplingConfig> sampling;  // unset: no sampling / emotion profiling
  std::filesystem::path predictions;
  std::filesystem::path emotions;  // empty: no emotion profiling
  std::filesystem::path raw_text;  // transcripts for the segment subcommand
  std::filesystem::path output_dir;
  std::vector<Level> levels = {Level::Sentence, Level::Utterance};
  std::size_t workers = 1;
  std::string config_hash;  // FNV-1a of the config file bytes, hex
};

/// Parses a JSON config. Relative paths resolve against base_dir. Throws
/// Error(ConfigError) naming the offending field.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// "sentence", "utterance" or "both".
std::vector<Level> parse_level_selection(std::string_view text);

/// Seed and sampling parameters must both be present. Throws ConfigError.
SamplingParams sampling_params(const RunConfig& config, Level level);

/// Sentence text, or sentence texts of the utterance joined by one space,
/// for each record.
std::vector<std::optional<std::string>> unit_texts(std::span<const ConsensusRecord> records,
                                                   const Dataset& dataset);

/// Manifests for every configured level, sentence level first.
std::vector<SampleManifest> sample_all(const RunConfig& config,
                                       std::span<const ConsensusRecord> records,
                                       const Dataset& dataset);

/// Sentence records followed by utterance records.
std::vector<ConsensusRecord> all_records(const TriangulationResult& tri);

RunMetadata metadata_of(const RunConfig& config);

/// Summary of what ingest kept and dropped.
std::string render_ingest_report(const Dataset& dataset, Mode mode);

struct PipelineResult {
  ReportBundle bundle;
  std::size_t dropped_units = 0;
  std::vector<Finding> warnings;
};

/// ingest -> aggregation -> consensus -> stratify -> agreement -> report.
/// Writes intermediates and the report bundle into config.output_dir.
/// Errors carry the stage name that raised them.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace ohsent
