#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ohsent/agreement.hpp"
#include "ohsent/consensus.hpp"
#include "ohsent/ingest.hpp"
#include "ohsent/stratify.hpp"

namespace ohsent {

struct DistributionRow {
  std::string model_id;  // empty for the triangulated row
  std::size_t n = 0;
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> pct{};
  bool neutral_absent = false;  // binary model: no Neutral cell at all
};

struct DistributionTable {
  Level level = Level::Sentence;
  std::vector<DistributionRow> models;  // roster order
  DistributionRow triangulated;
};

/// Per-model marginals from each record's per-model labels and the
/// triangulated marginals from the consensus labels.
DistributionTable polarity_distribution(std::span<const ConsensusRecord> records,
                                        const Roster& roster, Level level);

struct EmotionProfile {
  Stratum stratum = Stratum::B;
  Level level = Level::Sentence;
  std::size_t n_units = 0;
  std::map<std::string, std::size_t> counts;
  std::map<std::string, double> pct;
  std::map<std::string, double> mean_confidence;  // labels with count > 0 only
};

/// Joins each manifest's drawn units to their emotion prediction at the
/// manifest's level. One profile per manifest, same order.
/// Throws MissingEmotionPrediction.
std::vector<EmotionProfile> emotion_profile(std::span<const SampleManifest> manifests,
                                            std::span<const EmotionPrediction> emotions);

struct ResolutionCounts {
  std::size_t majority = 0;
  std::size_t confidence_split = 0;
  std::size_t fallback_model = 0;
};

ResolutionCounts count_resolutions(std::span<const ConsensusRecord> records);

struct LevelReport {
  Level level = Level::Sentence;
  DistributionTable distribution;
  Prevalence prevalence;
  ResolutionCounts resolutions;
  std::optional<LevelAgreement> agreement;  // unset when the level has no units
  std::vector<SampleManifest> manifests;    // empty when sampling is off
  std::vector<EmotionProfile> emotions;     // empty without emotion input
};

struct RunMetadata {
  std::string config_hash;
  std::optional<uint64_t> seed;
  std::string mode;
};

struct ReportBundle {
  Roster roster;
  RunMetadata metadata;
  std::vector<LevelReport> levels;  // sentence before utterance
  bool sampled = false;
  bool profiled = false;
};

struct ReportInputs {
  std::span<const ConsensusRecord> records;  // either or both levels
  std::span<const SampleManifest> manifests;
  std::optional<std::span<const EmotionPrediction>> emotions;
};

/// Computes every statistic for the requested levels.
ReportBundle build_report(const Roster& roster, const RunMetadata& metadata,
                          std::span<const Level> levels, const ReportInputs& inputs,
                          std::size_t workers = 1);

/// Individual output files, keyed by file name. Rendering is deterministic.
std::string render_distributions(const ReportBundle& bundle);
std::string render_triangulated(const ReportBundle& bundle);
std::string render_strata(const ReportBundle& bundle);
std::string render_resolutions(const ReportBundle& bundle);
std::string render_pairwise(const ReportBundle& bundle);
std::string render_fleiss(const ReportBundle& bundle);
std::string render_confusion(const ReportBundle& bundle);
std::string render_emotion_distribution(const LevelReport& level);
std::string render_emotion_confidence(const LevelReport& level);
std::string render_metadata(const ReportBundle& bundle);
std::string render_summary(const ReportBundle& bundle);

std::map<std::string, std::string> render(const ReportBundle& bundle);

/// Writes render(bundle) into dir. Throws IOError.
void write_report(const ReportBundle& bundle, const std::filesystem::path& dir);

/// printf-style fixed-point formatting ("%.<digits>f").
std::string fixed(double value, int digits);

}  // namespace ohsent
