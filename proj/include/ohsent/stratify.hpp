#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ohsent/consensus.hpp"

namespace ohsent {

/// ABC agreement strata, with unanimous agreement split by polarity.
enum class Stratum { AMinus, APlus, B, C };

/// Report order for every stratum table.
inline constexpr std::array<Stratum, 4> kStrata = {Stratum::AMinus, Stratum::APlus, Stratum::B,
                                                   Stratum::C};

std::string_view to_string(Stratum s);  // "A-1", "A+1", "B", "C"
std::optional<Stratum> parse_stratum(std::string_view text);

/// Throws WrongRosterSize (not three labels) or UnanimousNeutral.
Stratum classify_stratum(std::span<const Polarity> labels);

inline Stratum classify_stratum(const ConsensusRecord& rec) { return classify_stratum(rec.labels); }

struct StratumCount {
  Stratum stratum = Stratum::B;
  std::size_t count = 0;
  double share_pct = 0.0;
};

struct Prevalence {
  std::size_t total = 0;
  std::array<StratumCount, 4> rows{};  // kStrata order
};

Prevalence stratum_prevalence(std::span<const ConsensusRecord> records);

struct UnitRef {
  UtteranceKey utterance;
  std::optional<int64_t> sentence_idx;

  auto operator<=>(const UnitRef&) const = default;
  bool operator==(const UnitRef&) const = default;
};

inline UnitRef unit_of(const ConsensusRecord& r) { return {r.utterance, r.sentence_idx}; }

struct SamplingParams {
  std::size_t per_stratum = 0;
  std::size_t word_min = 10;
  std::size_t word_max = 350;
  uint64_t seed = 0;
};

struct SampleManifest {
  Level level = Level::Sentence;
  Stratum stratum = Stratum::B;
  std::size_t requested = 0;
  std::size_t eligible = 0;
  std::vector<UnitRef> drawn;  // sorted by key
  uint64_t seed = 0;
  std::size_t word_min = 0;
  std::size_t word_max = 0;

  bool shortfall() const noexcept { return drawn.size() < requested; }
};

/// Seeded stratified sample without replacement, one manifest per stratum.
///
/// texts[i] is the text of records[i]. Units outside [word_min, word_max]
/// whitespace tokens are ineligible. Each stratum draws from its own generator
/// seeded by derive_seed(seed, "sample/<level>/<stratum>") via a partial
/// Fisher-Yates shuffle of the eligible units in key order.
///
/// Throws MissingText when a unit of the level lacks text.
std::vector<SampleManifest> draw_sample(std::span<const ConsensusRecord> records,
                                        std::span<const std::optional<std::string>> texts,
                                        Level level, const SamplingParams& params);

}  // namespace ohsent
