#pragma once

// Shared helpers for the unit and acceptance suites: the default roster,
// record builders, random generators and brute-force reference formulas.
// The reference formulas are written straight from the textbook definitions
// and deliberately avoid the library's count-matrix arithmetic.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ohsent/agreement.hpp"
#include "ohsent/consensus.hpp"
#include "ohsent/corpus_model.hpp"

namespace fixtures {

using ohsent::Polarity;

inline const std::filesystem::path kData = OHSENT_TEST_DATA;
inline const std::filesystem::path kGolden = OHSENT_GOLDEN;

inline constexpr Polarity N = Polarity::Negative;
inline constexpr Polarity Z = Polarity::Neutral;
inline constexpr Polarity P = Polarity::Positive;

/// siebert (binary, fallback), cardiffnlp (ternary), nlptown (five-star).
inline ohsent::Roster default_roster() {
  return ohsent::Roster({
      {"siebert", ohsent::LabelSpace::Binary, false, true},
      {"cardiffnlp", ohsent::LabelSpace::Ternary, true, false},
      {"nlptown", ohsent::LabelSpace::FiveStar, true, false},
  });
}

inline std::vector<std::string> model_ids(const ohsent::Roster& roster) {
  std::vector<std::string> ids;
  for (const auto& m : roster.models()) ids.push_back(m.model_id);
  return ids;
}

inline ohsent::ConsensusRecord record(std::vector<Polarity> labels, int64_t idx = 0,
                                      ohsent::Level level = ohsent::Level::Sentence,
                                      std::vector<std::string> ids = {"siebert", "cardiffnlp",
                                                                      "nlptown"}) {
  ohsent::ConsensusRecord r;
  r.utterance = {"doc", level == ohsent::Level::Sentence ? 0 : idx};
  if (level == ohsent::Level::Sentence) r.sentence_idx = idx;
  r.level = level;
  r.model_ids = std::move(ids);
  r.labels = std::move(labels);
  if (level == ohsent::Level::Sentence) r.confidences.assign(r.labels.size(), 0.5);
  r.consensus = r.labels.front();
  return r;
}

/// Uniform label from the model's label space (binary: no Neutral).
inline Polarity random_label(std::mt19937_64& rng, bool neutral_capable) {
  if (!neutral_capable) return std::uniform_int_distribution<int>(0, 1)(rng) ? P : N;
  return ohsent::polarity_from_code(std::uniform_int_distribution<int>(-1, 1)(rng));
}

/// Random three-model records for `roster`, never unanimous Neutral.
inline std::vector<ohsent::ConsensusRecord> random_records(std::mt19937_64& rng,
                                                           const ohsent::Roster& roster,
                                                           std::size_t n) {
  std::vector<ohsent::ConsensusRecord> out;
  const auto ids = model_ids(roster);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Polarity> labels;
    for (const auto& m : roster.models()) labels.push_back(random_label(rng, m.neutral_capable));
    out.push_back(record(labels, static_cast<int64_t>(i), ohsent::Level::Sentence, ids));
  }
  return out;
}

// ---------------------------------------------------------------- oracles

struct OracleKappa {
  double p_o = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
};

/// kappa = (p_o - p_e) / (1 - p_e), with p_o the share of identical pairs and
/// p_e the sum over labels of the product of the two raters' marginal shares.
inline OracleKappa oracle_cohen(const std::vector<ohsent::LabelPair>& pairs) {
  OracleKappa k;
  const double n = static_cast<double>(pairs.size());
  for (const auto& [a, b] : pairs) k.p_o += (a == b) ? 1.0 / n : 0.0;
  for (Polarity l : ohsent::kPolarities) {
    double pa = 0, pb = 0;
    for (const auto& [a, b] : pairs) {
      if (a == l) pa += 1.0 / n;
      if (b == l) pb += 1.0 / n;
    }
    k.p_e += pa * pb;
  }
  k.kappa = (k.p_o - k.p_e) / (1.0 - k.p_e);
  return k;
}

/// Fleiss (1971): P_i = sum_j n_ij (n_ij - 1) / (r (r - 1)); P-bar the mean of
/// P_i; p_j the overall share of category j; P-bar_e = sum_j p_j^2.
inline OracleKappa oracle_fleiss(const std::vector<std::vector<Polarity>>& items) {
  OracleKappa k;
  const double n_items = static_cast<double>(items.size());
  const double r = static_cast<double>(items.front().size());
  for (const auto& item : items) {
    double agree = 0;
    for (Polarity l : ohsent::kPolarities) {
      const double nij = static_cast<double>(std::count(item.begin(), item.end(), l));
      agree += nij * (nij - 1);
    }
    k.p_o += agree / (r * (r - 1)) / n_items;
  }
  for (Polarity l : ohsent::kPolarities) {
    double pj = 0;
    for (const auto& item : items)
      pj += static_cast<double>(std::count(item.begin(), item.end(), l)) / (n_items * r);
    k.p_e += pj * pj;
  }
  k.kappa = (k.p_o - k.p_e) / (1.0 - k.p_e);
  return k;
}

/// Majority of three labels, if any.
inline std::optional<Polarity> oracle_majority(const std::array<Polarity, 3>& l) {
  if (l[0] == l[1] || l[0] == l[2]) return l[0];
  if (l[1] == l[2]) return l[1];
  return std::nullopt;
}

/// Stratum name from first principles: number of distinct labels and, when
/// unanimous, the shared polarity.
inline std::string oracle_stratum(const std::array<Polarity, 3>& l) {
  std::map<Polarity, int> distinct;
  for (Polarity p : l) ++distinct[p];
  if (distinct.size() == 1) return l[0] == P ? "A+1" : "A-1";
  return distinct.size() == 2 ? "B" : "C";
}

}  // namespace fixtures
