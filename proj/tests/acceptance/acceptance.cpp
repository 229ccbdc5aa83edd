// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Every check compares the library against an independent
// brute-force computation or against committed golden files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ohsent/agreement.hpp"
#include "ohsent/aggregation.hpp"
#include "ohsent/cli.hpp"
#include "ohsent/consensus.hpp"
#include "ohsent/error.hpp"
#include "ohsent/ingest.hpp"
#include "ohsent/stratify.hpp"

using namespace ohsent;
namespace fs = std::filesystem;
using fixtures::N;
using fixtures::P;
using fixtures::Z;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few failure reasons without flooding the output.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string notes() const {
    return std::to_string(failures_) + " failure(s): " + notes_;
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
};

int g_failed = 0;

void report(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
  }
  if (!o.pass) ++g_failed;
  std::printf("[%s] %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

fs::path scratch(const std::string& name) {
  static const std::string suffix = std::to_string(std::random_device{}());
  fs::path dir = fs::temp_directory_path() / ("ohsent_acceptance_" + suffix) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli_main(args, out, err);
}

// Every regular file under `a` must exist in `b` with identical bytes.
bool same_bundle(const fs::path& a, const fs::path& b, std::string& why) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || read_file(e.path()) != read_file(other)) {
      why = e.path().filename().string();
      return false;
    }
    ++n;
  }
  std::size_t m = std::distance(fs::directory_iterator(b), fs::directory_iterator{});
  if (n != m) {
    why = "file count " + std::to_string(n) + " vs " + std::to_string(m);
    return false;
  }
  return n > 0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

// ---------------------------------------------------------------- criteria

Outcome kappa_oracle() {
  std::mt19937_64 rng(1001);
  Checker c;
  double worst = 0.0;
  std::size_t compared = 0, degenerate = 0;
  for (int d = 0; d < 1000; ++d) {
    const std::size_t n = 1 + rng() % 50;
    // skewed label weights so near-degenerate marginals occur too
    std::array<double, 3> w{};
    for (auto& x : w) x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (d % 10 == 0) w = {0.0, 0.0, 1.0};
    std::discrete_distribution<int> pick(w.begin(), w.end());
    auto label = [&] { return polarity_from_code(pick(rng) - 1); };

    std::vector<LabelPair> pairs;
    std::vector<std::vector<Polarity>> items;
    for (std::size_t i = 0; i < n; ++i) {
      pairs.push_back({label(), label()});
      items.push_back({label(), label(), label()});
    }

    const auto ck = cohen_kappa(pairs);
    const auto co = fixtures::oracle_cohen(pairs);
    c.expect(ck.n == n, "cohen n");
    c.expect(std::abs(ck.percent_agreement - 100.0 * co.p_o) <= 1e-10, "cohen agreement");
    if (ck.degenerate) {
      ++degenerate;
      c.expect(std::abs(co.p_e - 1.0) <= 1e-12, "cohen flagged degenerate but p_e != 1");
    } else {
      worst = std::max(worst, std::abs(ck.kappa - co.kappa));
      c.expect(std::abs(ck.kappa - co.kappa) <= 1e-12, "cohen kappa d=" + std::to_string(d));
      ++compared;
    }

    const auto fk = fleiss_kappa(items, 3);
    const auto fo = fixtures::oracle_fleiss(items);
    if (fk.degenerate) {
      ++degenerate;
      c.expect(std::abs(fo.p_e - 1.0) <= 1e-12, "fleiss flagged degenerate but P_e != 1");
    } else {
      worst = std::max(worst, std::abs(fk.kappa - fo.kappa));
      c.expect(std::abs(fk.kappa - fo.kappa) <= 1e-12, "fleiss kappa d=" + std::to_string(d));
      c.expect(std::abs(fk.percent_agreement - 100.0 * fo.p_o) <= 1e-10, "fleiss P-bar");
      ++compared;
    }
  }
  return {c.ok(), c.ok() ? "1000 datasets, " + std::to_string(compared) + " kappas compared (" +
                               std::to_string(degenerate) + " degenerate), max |diff| " + fmt(worst)
                         : c.notes()};
}

// Brute-force sentence rule: majority, else unique top confidence, else fallback.
std::pair<Polarity, Resolution> oracle_sentence(const std::array<Polarity, 3>& l,
                                                const std::array<double, 3>& conf,
                                                std::size_t fallback) {
  if (auto m = fixtures::oracle_majority(l)) return {*m, Resolution::Majority};
  const double top = std::max({conf[0], conf[1], conf[2]});
  std::vector<std::size_t> at_top;
  for (std::size_t i = 0; i < 3; ++i)
    if (conf[i] == top) at_top.push_back(i);
  if (at_top.size() == 1) return {l[at_top[0]], Resolution::ConfidenceSplit};
  return {l[fallback], Resolution::FallbackModel};
}

// Exact aggregation winner with confidences given in thousandths: scores share
// the denominator 1000 N, so comparing summed thousandths compares scores.
Polarity oracle_aggregate(const std::vector<std::pair<Polarity, int>>& preds) {
  std::array<long, 3> sum{}, count{};
  for (auto [l, k] : preds) {
    sum[index_of(l)] += k;
    ++count[index_of(l)];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (sum[i] != sum[best]) {
      if (sum[i] > sum[best]) best = i;
    } else if (count[i] != count[best]) {
      if (count[i] > count[best]) best = i;
    } else if (count[i] > 0 && sum[i] * count[best] > sum[best] * count[i]) {
      best = i;
    }
  }
  return kPolarities[best];
}

Outcome exhaustive_small() {
  // Roster order: binary (fallback), ternary, five-star.
  const std::vector<std::string> ids{"bin", "ter", "five"};
  const std::array<std::array<double, 3>, 5> conf_patterns{{{0.5, 0.7, 0.9},
                                                            {0.9, 0.9, 0.2},
                                                            {0.8, 0.8, 0.8},
                                                            {0.3, 0.6, 0.6},
                                                            {0.95, 0.4, 0.7}}};
  const std::array<int, 5> conf_milli{900, 700, 800, 600, 400};
  std::vector<std::array<Polarity, 3>> unit_choices;
  for (Polarity a : {N, P})
    for (Polarity b : kPolarities)
      for (Polarity d : kPolarities) unit_choices.push_back({a, b, d});

  Checker c;
  std::size_t cases = 0;
  std::array<std::size_t, 3> resolutions{};
  const std::size_t k = unit_choices.size();  // 18 per unit, 18^4 = 2^4 * 3^8 assignments
  for (std::size_t code = 0; code < k * k * k * k; ++code) {
    std::array<std::array<Polarity, 3>, 4> units;
    std::size_t rest = code;
    for (auto& u : units) {
      u = unit_choices[rest % k];
      rest /= k;
    }
    ++cases;

    std::vector<ConsensusRecord> records;
    std::map<std::string, std::size_t> oracle_counts;
    std::array<std::vector<std::pair<Polarity, int>>, 3> per_model;  // utterance view
    for (std::size_t u = 0; u < 4; ++u) {
      const auto& labels = units[u];
      const auto& conf = conf_patterns[(code + u) % conf_patterns.size()];
      std::vector<Vote> votes;
      for (std::size_t m = 0; m < 3; ++m) votes.push_back({ids[m], labels[m], conf[m]});
      const auto rec = triangulate_sentence({"doc", 0, static_cast<int64_t>(u)}, votes, "bin");
      const auto [want, how] = oracle_sentence(labels, conf, 0);
      c.expect(rec.consensus == want && rec.resolution == how, "sentence rule");
      ++resolutions[static_cast<std::size_t>(rec.resolution)];

      const std::string name(to_string(classify_stratum(rec)));
      c.expect(name == fixtures::oracle_stratum(labels), "stratum");
      ++oracle_counts[fixtures::oracle_stratum(labels)];
      records.push_back(rec);

      for (std::size_t m = 0; m < 3; ++m)
        per_model[m].push_back({labels[m], conf_milli[(code + u + m) % conf_milli.size()]});
    }

    const auto prev = stratum_prevalence(records);
    std::size_t total = 0;
    for (const auto& row : prev.rows) {
      total += row.count;
      c.expect(row.count == oracle_counts[std::string(to_string(row.stratum))], "prevalence count");
    }
    c.expect(total == 4 && prev.total == 4, "strata partition");

    // The four units as one utterance: aggregate per model, then triangulate.
    std::vector<UtteranceAggregate> aggs;
    std::array<Polarity, 3> winners{};
    for (std::size_t m = 0; m < 3; ++m) {
      std::vector<HarmonizedPrediction> preds;
      for (std::size_t u = 0; u < 4; ++u)
        preds.push_back({{"doc", 0, static_cast<int64_t>(u)}, ids[m], per_model[m][u].first,
                         per_model[m][u].second / 1000.0});
      aggs.push_back(aggregate_utterance(preds));
      winners[m] = oracle_aggregate(per_model[m]);
      c.expect(aggs.back().winner == winners[m], "aggregate winner");
    }
    const auto utt = triangulate_utterance(aggs, "bin");
    const auto majority = fixtures::oracle_majority(winners);
    c.expect(utt.consensus == (majority ? *majority : winners[0]), "utterance rule");
    c.expect(utt.resolution == (majority ? Resolution::Majority : Resolution::FallbackModel),
             "utterance resolution");
  }
  return {c.ok() && resolutions[0] && resolutions[1] && resolutions[2],
          c.ok() ? std::to_string(cases) + " assignments (binary member constrained); resolutions " +
                       std::to_string(resolutions[0]) + " majority / " + std::to_string(resolutions[1]) +
                       " confidence / " + std::to_string(resolutions[2]) + " fallback"
                 : c.notes()};
}

Outcome aggregation_formula() {
  std::mt19937_64 rng(2002);
  Checker c;
  double worst = 0.0;
  std::size_t ties = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng() % 8;
    // half the cases on a coarse grid so exact ties are common
    const bool coarse = t % 2 == 0;
    std::vector<std::pair<Polarity, int>> raw;
    std::vector<HarmonizedPrediction> preds;
    for (std::size_t i = 0; i < n; ++i) {
      const int k = coarse ? 100 * static_cast<int>(1 + rng() % 9) : static_cast<int>(rng() % 1001);
      const Polarity l = fixtures::random_label(rng, true);
      raw.push_back({l, k});
      preds.push_back({{"d", 0, static_cast<int64_t>(i)}, "m", l, k / 1000.0});
    }
    const auto agg = aggregate_utterance(preds);

    // s(l) = (n_l / N) * meanConf(l), recomputed term by term
    std::array<long, 3> sum{};
    for (auto [l, k] : raw) sum[index_of(l)] += k;
    for (Polarity p : kPolarities) {
      const double expected = static_cast<double>(sum[index_of(p)]) / (1000.0 * static_cast<double>(n));
      worst = std::max(worst, std::abs(agg.score(p) - expected));
      c.expect(std::abs(agg.score(p) - expected) <= 1e-12, "score t=" + std::to_string(t));
    }
    const Polarity want = oracle_aggregate(raw);
    c.expect(agg.winner == want, "winner t=" + std::to_string(t));
    std::array<long, 3> sorted = sum;
    std::sort(sorted.begin(), sorted.end());
    ties += sorted[2] == sorted[1];

    for (int perm = 0; perm < 3; ++perm) {
      std::shuffle(preds.begin(), preds.end(), rng);
      const auto again = aggregate_utterance(preds);
      c.expect(again.winner == agg.winner && again.scores == agg.scores, "permutation t=" + std::to_string(t));
    }
  }
  return {c.ok(), c.ok() ? "10000 utterances (" + std::to_string(ties) + " with tied top score), max |diff| " +
                               fmt(worst) + ", invariant under 30000 permutations"
                         : c.notes()};
}

Outcome structural_nonneutral() {
  std::mt19937_64 rng(3003);
  Checker c;
  for (int d = 0; d < 100; ++d) {
    // one binary model at a random roster position, random fallback
    std::vector<ModelSpec> specs{{"ternary", LabelSpace::Ternary, true, false},
                                 {"stars", LabelSpace::FiveStar, true, false}};
    specs.insert(specs.begin() + static_cast<long>(rng() % 3), {"binary", LabelSpace::Binary, false, false});
    specs[rng() % 3].is_fallback = true;
    const Roster roster(specs);
    auto records = fixtures::random_records(rng, roster, 1 + rng() % 200);
    const auto la = compute_agreement(records, roster, Level::Sentence, 1 + rng() % 4);

    std::size_t brute = 0;
    for (const auto& r : records)
      brute += *r.label_of("ternary") != Z && *r.label_of("stars") != Z;
    for (const auto& p : la.pairs) {
      const bool neutral_pair = (p.model_a == "ternary" && p.model_b == "stars") ||
                                (p.model_a == "stars" && p.model_b == "ternary");
      if (neutral_pair) c.expect(la.fleiss.n_nonneutral == p.n_nonneutral, "overall N != pairwise N");
    }
    c.expect(la.fleiss.n_nonneutral == brute, "overall N != brute-force count");
  }
  return {c.ok(), c.ok() ? "100 datasets: overall polarity-only N == neutral-capable pair N" : c.notes()};
}

Outcome confusion_rows() {
  std::mt19937_64 rng(4004);
  Checker c;
  const Roster roster = fixtures::default_roster();
  std::size_t rows = 0;
  for (int d = 0; d < 100; ++d) {
    auto records = fixtures::random_records(rng, roster, 1 + rng() % 300);
    const auto la = compute_agreement(records, roster, Level::Sentence, 1 + rng() % 8);
    c.expect(la.confusions.size() == 6, "six ordered pairs");
    for (const auto& m : la.confusions) {
      for (Polarity r : kPolarities) {
        std::array<std::size_t, 3> brute{};
        for (const auto& rec : records)
          if (*rec.label_of(m.row_model) == r) ++brute[index_of(*rec.label_of(m.col_model))];
        c.expect(m.counts[index_of(r)] == brute, "counts " + m.row_model + "/" + m.col_model);
        const bool empty = brute[0] + brute[1] + brute[2] == 0;
        c.expect(m.row_empty[index_of(r)] == empty, "empty flag");
        if (empty) continue;
        double sum = 0;
        for (double v : m.row_pct[index_of(r)]) sum += v;
        c.expect(std::abs(sum - 100.0) <= 0.1, "row sum");
        ++rows;
      }
    }
  }
  return {c.ok(), c.ok() ? "100 datasets, " + std::to_string(rows) + " non-empty rows sum to 100 +- 0.1, counts match"
                         : c.notes()};
}

Outcome golden_end_to_end() {
  const fs::path out = scratch("golden");
  if (run_cli({"run", "--config", (fixtures::kData / "minicorpus_config.json").string(), "--out", out.string()}) != 0)
    return {false, "run failed"};
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(fixtures::kGolden)) {
    const fs::path produced = out / e.path().filename();
    if (!fs::exists(produced)) return {false, "missing " + e.path().filename().string()};
    if (read_file(produced) != read_file(e.path())) return {false, "differs: " + e.path().filename().string()};
    ++n;
  }
  return {n >= 12, std::to_string(n) + " golden files byte-identical (tables, strata, manifests, emotion grids)"};
}

// ~50k prediction records over random documents, plus emotion predictions for
// every sentence and utterance, and a config that samples and profiles them.
fs::path write_fuzz_corpus(const fs::path& dir) {
  std::mt19937_64 rng(5005);
  const char* words[] = {"we", "hid", "in", "the", "barn", "cold", "mother", "bread", "train", "home",
                         "spring", "quiet", "music", "forest", "father", "war", "kind", "afraid"};
  const char* emotions[] = {"joy", "sadness", "anger", "fear", "love", "surprise"};
  std::ofstream preds(dir / "predictions.jsonl"), emo(dir / "emotions.jsonl");
  std::size_t records = 0;
  auto conf = [&] { return std::to_string(rng() % 1001 / 1000.0).substr(0, 5); };
  for (int doc = 0; records < 50000; ++doc) {
    const std::string doc_id = "fz-" + std::to_string(doc);
    for (int u = 0; u < 25 && records < 50000; ++u) {
      const int n_sent = 1 + static_cast<int>(rng() % 6);
      for (int s = 0; s < n_sent; ++s) {
        std::string text;
        const int n_words = 1 + static_cast<int>(rng() % 30);
        for (int w = 0; w < n_words; ++w) text += std::string(w ? " " : "") + words[rng() % 18];
        text += ".";
        const std::string key = "{\"doc_id\":\"" + doc_id + "\",\"utt_idx\":" + std::to_string(u) +
                                ",\"sent_idx\":" + std::to_string(s);
        const char* bin = rng() % 2 ? "positive" : "NEGATIVE";
        const char* ter[] = {"negative", "neutral", "positive"};
        preds << key << ",\"model\":\"siebert\",\"label\":\"" << bin << "\",\"confidence\":" << conf()
              << ",\"text\":\"" << text << "\"}\n";
        preds << key << ",\"model\":\"cardiffnlp\",\"label\":\"" << ter[rng() % 3] << "\",\"confidence\":" << conf()
              << ",\"text\":\"" << text << "\"}\n";
        preds << key << ",\"model\":\"nlptown\",\"label\":\"" << 1 + rng() % 5 << "\",\"confidence\":" << conf()
              << ",\"text\":\"" << text << "\"}\n";
        records += 3;
        emo << key << ",\"emotion\":\"" << emotions[rng() % 6] << "\",\"confidence\":" << conf() << "}\n";
      }
      emo << "{\"doc_id\":\"" << doc_id << "\",\"utt_idx\":" << u << ",\"emotion\":\"" << emotions[rng() % 6]
          << "\",\"confidence\":" << conf() << "}\n";
    }
  }
  std::ofstream cfg(dir / "config.json");
  cfg << R"({
  "roster": [
    {"model_id": "siebert", "label_space": "binary", "neutral_capable": false, "fallback": true},
    {"model_id": "cardiffnlp", "label_space": "ternary", "neutral_capable": true, "fallback": false},
    {"model_id": "nlptown", "label_space": "five_star", "neutral_capable": true, "fallback": false}
  ],
  "seed": 987654321,
  "sampling": {"sentence_per_stratum": 300, "utterance_per_stratum": 150, "word_min": 10, "word_max": 350},
  "inputs": {"predictions": "predictions.jsonl", "emotions": "emotions.jsonl"}
})";
  return dir / "config.json";
}

Outcome parallel_determinism() {
  std::string why;
  const std::string mini = (fixtures::kData / "minicorpus_config.json").string();
  const fs::path m1 = scratch("mini_w1"), m8 = scratch("mini_w8");
  if (run_cli({"run", "--config", mini, "--out", m1.string(), "--workers", "1"}) != 0 ||
      run_cli({"run", "--config", mini, "--out", m8.string(), "--workers", "8"}) != 0)
    return {false, "mini-corpus run failed"};
  if (!same_bundle(m1, m8, why)) return {false, "mini-corpus bundles differ: " + why};

  const fs::path corpus = scratch("fuzz");
  const std::string cfg = write_fuzz_corpus(corpus).string();
  const fs::path f1 = scratch("fuzz_w1"), f8 = scratch("fuzz_w8");
  if (run_cli({"run", "--config", cfg, "--out", f1.string(), "--workers", "1"}) != 0 ||
      run_cli({"run", "--config", cfg, "--out", f8.string(), "--workers", "8"}) != 0)
    return {false, "fuzzed run failed"};
  if (!same_bundle(f1, f8, why)) return {false, "fuzzed bundles differ: " + why};

  std::size_t lines = 0;
  for (char ch : read_file(corpus / "predictions.jsonl")) lines += ch == '\n';
  const std::size_t files = std::distance(fs::directory_iterator(f1), fs::directory_iterator{});
  return {true, "workers 1 vs 8 byte-identical: mini-corpus and " + std::to_string(lines) +
                    "-record fuzzed dataset (" + std::to_string(files) + " files each)"};
}

Outcome ingest_findings() {
  struct Case {
    const char* file;
    ErrorCode code;
    std::vector<std::size_t> lines;
  };
  const std::vector<Case> cases{
      {"err_confidence_out_of_range.jsonl", ErrorCode::ConfidenceOutOfRange, {5}},
      {"err_duplicate.jsonl", ErrorCode::DuplicateRecord, {2, 7}},
      {"err_missing_model.jsonl", ErrorCode::MissingModel, {4, 5}},
      {"err_neutral_from_binary.jsonl", ErrorCode::NeutralFromBinary, {4}},
  };
  const Roster roster = fixtures::default_roster();
  const std::string config = (fixtures::kData / "fixture_config.json").string();
  Checker c;
  std::string summary;
  for (const auto& k : cases) {
    const fs::path path = fixtures::kData / k.file;
    const auto findings = validate_predictions(read_file(path), roster);
    c.expect(findings.size() == 1, std::string(k.file) + ": expected exactly one finding");
    if (findings.size() == 1) {
      c.expect(findings[0].code == k.code, std::string(k.file) + ": wrong code");
      c.expect(findings[0].lines == k.lines, std::string(k.file) + ": wrong lines");
    }
    try {
      load_predictions(path, roster);
      c.expect(false, std::string(k.file) + ": strict load accepted the file");
    } catch (const Error& e) {
      c.expect(e.code() == k.code && e.line() == k.lines.front(), std::string(k.file) + ": strict error");
    }
    c.expect(run_cli({"validate", "--config", config, "--input", path.string()}) == kExitDataError,
             std::string(k.file) + ": validate exit code");
    summary += (summary.empty() ? "" : ", ") + std::string(to_string(k.code)) + "@";
    for (std::size_t i = 0; i < k.lines.size(); ++i) summary += (i ? "+" : "") + std::to_string(k.lines[i]);
  }
  c.expect(validate_predictions(read_file(fixtures::kData / "valid_min.jsonl"), roster).empty(),
           "valid fixture has findings");
  return {c.ok(), c.ok() ? summary + "; valid fixture clean" : c.notes()};
}

}  // namespace

int main() {
  report("kappa_oracle_equivalence", 10, kappa_oracle);
  report("exhaustive_small_instances", 60, exhaustive_small);
  report("aggregation_formula", 60, aggregation_formula);
  report("polarity_only_structural_consistency", 60, structural_nonneutral);
  report("confusion_matrix_rows", 60, confusion_rows);
  report("golden_end_to_end", 5, golden_end_to_end);
  report("parallel_determinism", 120, parallel_determinism);
  report("ingest_validation_findings", 60, ingest_findings);
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
