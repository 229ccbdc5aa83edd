#include "ohsent/stratify.hpp"

#include <algorithm>

#include "ohsent/error.hpp"
#include "ohsent/rng.hpp"
#include "ohsent/segment.hpp"

namespace ohsent {

std::string_view to_string(Stratum s) {
  switch (s) {
    case Stratum::AMinus: return "A-1";
    case Stratum::APlus: return "A+1";
    case Stratum::B: return "B";
    case Stratum::C: return "C";
  }
  return "?";
}

std::optional<Stratum> parse_stratum(std::string_view text) {
  for (Stratum s : kStrata)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

Stratum classify_stratum(std::span<const Polarity> labels) {
  if (labels.size() != 3)
    throw Error(ErrorCode::WrongRosterSize,
                "stratification needs exactly 3 labels, got " + std::to_string(labels.size()));
  const bool ab = labels[0] == labels[1];
  const bool ac = labels[0] == labels[2];
  const bool bc = labels[1] == labels[2];
  if (ab && ac) {
    switch (labels[0]) {
      case Polarity::Negative: return Stratum::AMinus;
      case Polarity::Positive: return Stratum::APlus;
      case Polarity::Neutral:
        throw Error(ErrorCode::UnanimousNeutral,
                    "all three models say neutral; the roster should include a binary model");
    }
  }
  if (ab || ac || bc) return Stratum::B;
  return Stratum::C;
}

Prevalence stratum_prevalence(std::span<const ConsensusRecord> records) {
  Prevalence p;
  for (std::size_t i = 0; i < kStrata.size(); ++i) p.rows[i].stratum = kStrata[i];
  for (const auto& r : records) {
    if (r.level != records.front().level)
      throw Error(ErrorCode::MismatchedUnits, "prevalence over records of mixed levels");
    ++p.rows[static_cast<std::size_t>(classify_stratum(r))].count;
  }
  p.total = records.size();
  if (p.total > 0)
    for (auto& row : p.rows)
      row.share_pct = 100.0 * static_cast<double>(row.count) / static_cast<double>(p.total);
  return p;
}

std::vector<SampleManifest> draw_sample(std::span<const ConsensusRecord> records,
                                        std::span<const std::optional<std::string>> texts,
                                        Level level, const SamplingParams& params) {
  if (texts.size() != records.size())
    throw Error(ErrorCode::MismatchedUnits, "text list does not match record list");

  std::array<std::vector<std::size_t>, 4> eligible;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.level != level) continue;
    if (!texts[i]) {
      std::string where = r.utterance.doc_id + "/" + std::to_string(r.utterance.utterance_idx);
      if (r.sentence_idx) where += "/" + std::to_string(*r.sentence_idx);
      throw Error(ErrorCode::MissingText, "unit " + where + " has no text for word filtering");
    }
    const std::size_t words = word_count(*texts[i]);
    if (words < params.word_min || words > params.word_max) continue;
    eligible[static_cast<std::size_t>(classify_stratum(r))].push_back(i);
  }

  std::vector<SampleManifest> out;
  for (Stratum s : kStrata) {
    auto& pool = eligible[static_cast<std::size_t>(s)];
    std::sort(pool.begin(), pool.end(),
              [&](std::size_t a, std::size_t b) { return unit_of(records[a]) < unit_of(records[b]); });

    SampleManifest m;
    m.level = level;
    m.stratum = s;
    m.requested = params.per_stratum;
    m.eligible = pool.size();
    m.seed = params.seed;
    m.word_min = params.word_min;
    m.word_max = params.word_max;

    const std::string stage = "sample/" + std::string(to_string(level)) + "/" + std::string(to_string(s));
    Xoshiro256StarStar rng(derive_seed(params.seed, stage));
    const std::size_t take = std::min(params.per_stratum, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      m.drawn.push_back(unit_of(records[pool[i]]));
    }
    std::sort(m.drawn.begin(), m.drawn.end());
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ohsent
