#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ohsent/consensus.hpp"
#include "ohsent/corpus_model.hpp"

namespace ohsent {

using LabelPair = std::pair<Polarity, Polarity>;

/// counts[row label][column label], indexed by index_of(Polarity).
using CountMatrix = std::array<std::array<std::size_t, 3>, 3>;

struct KappaResult {
  std::size_t n = 0;
  double percent_agreement = 0.0;  // observed agreement, in percent
  double kappa = 0.0;
  /// Chance agreement is exactly 1: kappa is 1 if agreement is perfect, else 0.
  bool degenerate = false;
};

/// Cohen's kappa over the shared three-way space. Throws EmptyInput.
KappaResult cohen_kappa(std::span<const LabelPair> pairs);
KappaResult cohen_kappa(const CountMatrix& counts);

/// Fleiss' kappa for a fixed number of raters per item. percent_agreement is
/// the mean per-item agreement P-bar in percent.
/// Throws EmptyInput or WrongRaterCount (an item with != raters ratings).
KappaResult fleiss_kappa(std::span<const std::vector<Polarity>> items, std::size_t raters = 3);

/// Fleiss' kappa from per-item category counts (each row sums to raters).
KappaResult fleiss_kappa(std::span<const std::array<std::size_t, 3>> category_counts,
                         std::size_t raters);

struct ConfusionMatrix {
  std::string row_model;
  std::string col_model;
  CountMatrix counts{};
  std::array<std::array<double, 3>, 3> row_pct{};  // 0 in empty rows
  std::array<bool, 3> row_empty{};

  std::size_t row_total(Polarity p) const;
};

ConfusionMatrix confusion(std::string row_model, std::string col_model, const CountMatrix& counts);

/// Tally of two models' labels over the records. Throws UnknownModel.
CountMatrix tally(std::span<const ConsensusRecord> records, const std::string& row_model,
                  const std::string& col_model, std::size_t workers = 1);

/// Indices of records where neither model of the pair says Neutral.
std::vector<std::size_t> nonneutral_pair(std::span<const ConsensusRecord> records,
                                         const std::string& model_a, const std::string& model_b);

/// Indices of records where no neutral-capable roster model says Neutral.
std::vector<std::size_t> nonneutral_overall(std::span<const ConsensusRecord> records,
                                            const Roster& roster);

struct PairwiseAgreement {
  std::string model_a;
  std::string model_b;
  KappaResult full;
  std::size_t n_nonneutral = 0;
  std::optional<KappaResult> nonneutral;  // unset when the subset is empty
};

struct FleissSummary {
  KappaResult full;
  std::size_t n_nonneutral = 0;
  std::optional<KappaResult> nonneutral;
};

struct LevelAgreement {
  Level level = Level::Sentence;
  std::vector<PairwiseAgreement> pairs;     // roster order, a before b
  FleissSummary fleiss;
  std::vector<ConfusionMatrix> confusions;  // every ordered pair of distinct models
};

/// Pairwise/overall kappa and confusion matrices for one level. Records must
/// all be of `level` and list the roster's three models. Throws EmptyInput.
LevelAgreement compute_agreement(std::span<const ConsensusRecord> records, const Roster& roster,
                                 Level level, std::size_t workers = 1);

}  // namespace ohsent
