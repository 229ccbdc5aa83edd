#include "ohsent/agreement.hpp"

#include <algorithm>

#include "ohsent/error.hpp"
#include "ohsent/parallel.hpp"

namespace ohsent {

KappaResult cohen_kappa(const CountMatrix& counts) {
  std::size_t n = 0;
  std::size_t agree = 0;
  std::array<std::size_t, 3> rows{};
  std::array<std::size_t, 3> cols{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      n += counts[r][c];
      rows[r] += counts[r][c];
      cols[c] += counts[r][c];
      if (r == c) agree += counts[r][c];
    }
  if (n == 0) throw Error(ErrorCode::EmptyInput, "kappa over zero items");

  std::size_t chance_num = 0;  // sum of marginal products, over n^2
  for (std::size_t l = 0; l < 3; ++l) chance_num += rows[l] * cols[l];

  KappaResult out;
  out.n = n;
  const double dn = static_cast<double>(n);
  const double p_o = static_cast<double>(agree) / dn;
  out.percent_agreement = 100.0 * p_o;
  if (chance_num == n * n) {
    out.degenerate = true;
    out.kappa = agree == n ? 1.0 : 0.0;
    return out;
  }
  const double p_e = static_cast<double>(chance_num) / (dn * dn);
  out.kappa = (p_o - p_e) / (1.0 - p_e);
  return out;
}

KappaResult cohen_kappa(std::span<const LabelPair> pairs) {
  CountMatrix counts{};
  for (const auto& [a, b] : pairs) ++counts[index_of(a)][index_of(b)];
  return cohen_kappa(counts);
}

KappaResult fleiss_kappa(std::span<const std::array<std::size_t, 3>> category_counts,
                         std::size_t raters) {
  if (category_counts.empty()) throw Error(ErrorCode::EmptyInput, "Fleiss kappa over zero items");
  if (raters < 2) throw Error(ErrorCode::WrongRaterCount, "Fleiss kappa needs at least 2 raters");

  std::array<std::size_t, 3> totals{};
  std::size_t sum_sq = 0;  // sum over items and categories of n_ij^2
  for (const auto& row : category_counts) {
    std::size_t item = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      item += row[j];
      totals[j] += row[j];
      sum_sq += row[j] * row[j];
    }
    if (item != raters)
      throw Error(ErrorCode::WrongRaterCount,
                  "item with " + std::to_string(item) + " ratings, expected " + std::to_string(raters));
  }

  const std::size_t n_items = category_counts.size();
  const double n = static_cast<double>(n_items);
  const double r = static_cast<double>(raters);
  const std::size_t ratings = n_items * raters;

  KappaResult out;
  out.n = n_items;
  // mean of P_i = (sum_j n_ij^2 - r) / (r (r - 1))
  const double p_bar = (static_cast<double>(sum_sq) - n * r) / (n * r * (r - 1.0));
  out.percent_agreement = 100.0 * p_bar;

  if (std::find(totals.begin(), totals.end(), ratings) != totals.end()) {
    out.degenerate = true;
    out.kappa = sum_sq == n_items * raters * raters ? 1.0 : 0.0;
    return out;
  }
  double p_e = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double p = static_cast<double>(totals[j]) / static_cast<double>(ratings);
    p_e += p * p;
  }
  out.kappa = (p_bar - p_e) / (1.0 - p_e);
  return out;
}

KappaResult fleiss_kappa(std::span<const std::vector<Polarity>> items, std::size_t raters) {
  std::vector<std::array<std::size_t, 3>> counts;
  counts.reserve(items.size());
  for (const auto& item : items) {
    if (item.size() != raters)
      throw Error(ErrorCode::WrongRaterCount, "item with " + std::to_string(item.size()) +
                                                  " ratings, expected " + std::to_string(raters));
    std::array<std::size_t, 3> row{};
    for (Polarity p : item) ++row[index_of(p)];
    counts.push_back(row);
  }
  return fleiss_kappa(counts, raters);
}

std::size_t ConfusionMatrix::row_total(Polarity p) const {
  const auto& row = counts[index_of(p)];
  return row[0] + row[1] + row[2];
}

ConfusionMatrix confusion(std::string row_model, std::string col_model, const CountMatrix& counts) {
  ConfusionMatrix m;
  m.row_model = std::move(row_model);
  m.col_model = std::move(col_model);
  m.counts = counts;
  for (std::size_t r = 0; r < 3; ++r) {
    const std::size_t total = counts[r][0] + counts[r][1] + counts[r][2];
    m.row_empty[r] = total == 0;
    if (total == 0) continue;
    for (std::size_t c = 0; c < 3; ++c)
      m.row_pct[r][c] = 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(total);
  }
  return m;
}

namespace {

std::size_t column_of(const ConsensusRecord& rec, const std::string& model) {
  auto it = std::find(rec.model_ids.begin(), rec.model_ids.end(), model);
  if (it == rec.model_ids.end()) throw Error(ErrorCode::UnknownModel, "record lacks model " + model);
  return static_cast<std::size_t>(it - rec.model_ids.begin());
}

}  // namespace

CountMatrix tally(std::span<const ConsensusRecord> records, const std::string& row_model,
                  const std::string& col_model, std::size_t workers) {
  workers = std::max<std::size_t>(1, std::min(workers, records.size()));
  std::vector<CountMatrix> partial(workers, CountMatrix{});
  const std::size_t block = records.empty() ? 0 : (records.size() + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::size_t end = std::min(records.size(), (w + 1) * block);
    for (std::size_t i = w * block; i < end; ++i) {
      const auto& rec = records[i];
      ++partial[w][index_of(rec.labels[column_of(rec, row_model)])]
                  [index_of(rec.labels[column_of(rec, col_model)])];
    }
  });
  CountMatrix total{};
  for (const auto& p : partial)
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) total[r][c] += p[r][c];
  return total;
}

std::vector<std::size_t> nonneutral_pair(std::span<const ConsensusRecord> records,
                                         const std::string& model_a, const std::string& model_b) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.labels[column_of(rec, model_a)] == Polarity::Neutral) continue;
    if (rec.labels[column_of(rec, model_b)] == Polarity::Neutral) continue;
    keep.push_back(i);
  }
  return keep;
}

std::vector<std::size_t> nonneutral_overall(std::span<const ConsensusRecord> records,
                                            const Roster& roster) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    bool neutral = false;
    for (const auto& spec : roster.models())
      if (spec.neutral_capable && rec.labels[column_of(rec, spec.model_id)] == Polarity::Neutral)
        neutral = true;
    if (!neutral) keep.push_back(i);
  }
  return keep;
}

LevelAgreement compute_agreement(std::span<const ConsensusRecord> records, const Roster& roster,
                                 Level level, std::size_t workers) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records at level " + std::string(to_string(level)));
  for (const auto& r : records)
    if (r.level != level) throw Error(ErrorCode::MismatchedUnits, "record of the wrong level");

  LevelAgreement out;
  out.level = level;
  const auto models = roster.models();

  std::vector<ConsensusRecord> subset;
  auto gather = [&](const std::vector<std::size_t>& idx) {
    subset.clear();
    subset.reserve(idx.size());
    for (std::size_t i : idx) subset.push_back(records[i]);
  };

  for (std::size_t a = 0; a < models.size(); ++a)
    for (std::size_t b = a + 1; b < models.size(); ++b) {
      PairwiseAgreement pa;
      pa.model_a = models[a].model_id;
      pa.model_b = models[b].model_id;
      pa.full = cohen_kappa(tally(records, pa.model_a, pa.model_b, workers));
      gather(nonneutral_pair(records, pa.model_a, pa.model_b));
      pa.n_nonneutral = subset.size();
      if (!subset.empty()) pa.nonneutral = cohen_kappa(tally(subset, pa.model_a, pa.model_b, workers));
      out.pairs.push_back(std::move(pa));
    }

  auto fleiss_over = [&](std::span<const ConsensusRecord> recs) {
    std::vector<std::array<std::size_t, 3>> counts(recs.size());
    parallel_for(recs.size(), workers, [&](std::size_t i) {
      for (Polarity p : recs[i].labels) ++counts[i][index_of(p)];
    });
    return fleiss_kappa(counts, models.size());
  };
  out.fleiss.full = fleiss_over(records);
  gather(nonneutral_overall(records, roster));
  out.fleiss.n_nonneutral = subset.size();
  if (!subset.empty()) out.fleiss.nonneutral = fleiss_over(subset);

  for (std::size_t a = 0; a < models.size(); ++a)
    for (std::size_t b = 0; b < models.size(); ++b) {
      if (a == b) continue;
      out.confusions.push_back(confusion(models[a].model_id, models[b].model_id,
                                         tally(records, models[a].model_id, models[b].model_id, workers)));
    }
  return out;
}

}  // namespace ohsent
