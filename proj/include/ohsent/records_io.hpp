#pragma once

// Line-delimited JSON forms of the intermediate artifacts that pass between
// subcommands: utterance aggregates, consensus records and sample manifests.
// Every writer emits keys in sorted order with compact separators, so equal
// values always serialize to equal bytes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ohsent/aggregation.hpp"
#include "ohsent/consensus.hpp"
#include "ohsent/stratify.hpp"

namespace ohsent {

std::string serialize_aggregates(const std::vector<std::vector<UtteranceAggregate>>& aggregates);
/// Grouped by utterance in key order; models follow roster order.
std::vector<std::vector<UtteranceAggregate>> parse_aggregates(std::string_view content,
                                                              const Roster& roster);

std::string serialize_consensus(std::span<const ConsensusRecord> records);
/// Per-model vectors are reordered to roster order. Throws SchemaError or
/// UnknownModel with line numbers.
std::vector<ConsensusRecord> parse_consensus(std::string_view content, const Roster& roster);

std::string serialize_manifests(std::span<const SampleManifest> manifests);
std::vector<SampleManifest> parse_manifests(std::string_view content);

/// Writes bytes to path, creating parent directories. Throws IOError.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ohsent
