#include "ohsent/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

#include "ohsent/error.hpp"
#include "ohsent/records_io.hpp"
#include "ohsent/rng.hpp"

namespace ohsent {

using nlohmann::json;

namespace {

constexpr const char* kAbsent = "---";  // binary model, no Neutral cell
constexpr const char* kNotAvailable = "NA";

std::string pct1(double v) { return fixed(v, 1); }

void fill_pct(DistributionRow& row) {
  if (row.n == 0) return;
  for (std::size_t i = 0; i < 3; ++i)
    row.pct[i] = 100.0 * static_cast<double>(row.counts[i]) / static_cast<double>(row.n);
}

std::string level_name(const LevelReport& l) { return std::string(to_string(l.level)); }

std::vector<std::string> emotion_columns(const LevelReport& level) {
  std::set<std::string> labels;
  for (const auto& p : level.emotions)
    for (const auto& [label, n] : p.counts) labels.insert(label);
  return {labels.begin(), labels.end()};
}

const char* flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

DistributionTable polarity_distribution(std::span<const ConsensusRecord> records,
                                        const Roster& roster, Level level) {
  DistributionTable t;
  t.level = level;
  for (const auto& spec : roster.models()) {
    DistributionRow row;
    row.model_id = spec.model_id;
    row.neutral_absent = !spec.neutral_capable;
    t.models.push_back(row);
  }
  for (const auto& r : records) {
    if (r.level != level) continue;
    for (std::size_t m = 0; m < t.models.size(); ++m) {
      auto label = r.label_of(t.models[m].model_id);
      if (!label) throw Error(ErrorCode::UnknownModel, "record lacks model " + t.models[m].model_id);
      ++t.models[m].counts[index_of(*label)];
      ++t.models[m].n;
    }
    ++t.triangulated.counts[index_of(r.consensus)];
    ++t.triangulated.n;
  }
  for (auto& row : t.models) fill_pct(row);
  fill_pct(t.triangulated);
  return t;
}

std::vector<EmotionProfile> emotion_profile(std::span<const SampleManifest> manifests,
                                            std::span<const EmotionPrediction> emotions) {
  std::map<UnitRef, const EmotionPrediction*> index;
  for (const auto& e : emotions) index.emplace(UnitRef{e.utterance, e.sentence_idx}, &e);

  std::vector<EmotionProfile> out;
  for (const auto& m : manifests) {
    EmotionProfile p;
    p.stratum = m.stratum;
    p.level = m.level;
    p.n_units = m.drawn.size();
    std::map<std::string, double> conf_sum;
    for (const auto& unit : m.drawn) {
      auto it = index.find(unit);
      if (it == index.end()) {
        std::string where = unit.utterance.doc_id + "/" + std::to_string(unit.utterance.utterance_idx);
        if (unit.sentence_idx) where += "/" + std::to_string(*unit.sentence_idx);
        throw Error(ErrorCode::MissingEmotionPrediction,
                    "no " + std::string(to_string(m.level)) + "-level emotion record for " + where);
      }
      ++p.counts[it->second->emotion];
      conf_sum[it->second->emotion] += it->second->confidence;
    }
    for (const auto& [label, n] : p.counts) {
      p.pct[label] = 100.0 * static_cast<double>(n) / static_cast<double>(p.n_units);
      p.mean_confidence[label] = conf_sum[label] / static_cast<double>(n);
    }
    out.push_back(std::move(p));
  }
  return out;
}

ResolutionCounts count_resolutions(std::span<const ConsensusRecord> records) {
  ResolutionCounts c;
  for (const auto& r : records) {
    switch (r.resolution) {
      case Resolution::Majority: ++c.majority; break;
      case Resolution::ConfidenceSplit: ++c.confidence_split; break;
      case Resolution::FallbackModel: ++c.fallback_model; break;
    }
  }
  return c;
}

ReportBundle build_report(const Roster& roster, const RunMetadata& metadata,
                          std::span<const Level> levels, const ReportInputs& inputs,
                          std::size_t workers) {
  ReportBundle bundle{roster, metadata, {}, false, false};
  bundle.sampled = !inputs.manifests.empty();
  bundle.profiled = bundle.sampled && inputs.emotions.has_value();

  std::vector<Level> ordered(levels.begin(), levels.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  for (Level level : ordered) {
    std::vector<ConsensusRecord> recs;
    for (const auto& r : inputs.records)
      if (r.level == level) recs.push_back(r);

    LevelReport lr;
    lr.level = level;
    lr.distribution = polarity_distribution(recs, roster, level);
    lr.prevalence = stratum_prevalence(recs);
    lr.resolutions = count_resolutions(recs);
    if (!recs.empty()) lr.agreement = compute_agreement(recs, roster, level, workers);
    for (const auto& m : inputs.manifests)
      if (m.level == level) lr.manifests.push_back(m);
    if (bundle.profiled) lr.emotions = emotion_profile(lr.manifests, *inputs.emotions);
    bundle.levels.push_back(std::move(lr));
  }
  return bundle;
}

std::string render_distributions(const ReportBundle& bundle) {
  std::string out = "level,model,label_space,n,negative_pct,neutral_pct,positive_pct\n";
  for (const auto& l : bundle.levels) {
    for (std::size_t m = 0; m < l.distribution.models.size(); ++m) {
      const auto& row = l.distribution.models[m];
      out += level_name(l) + "," + row.model_id + "," +
             std::string(to_string(bundle.roster[m].label_space)) + "," + std::to_string(row.n) + "," +
             pct1(row.pct[0]) + "," + (row.neutral_absent ? kAbsent : pct1(row.pct[1])) + "," +
             pct1(row.pct[2]) + "\n";
    }
  }
  return out;
}

std::string render_triangulated(const ReportBundle& bundle) {
  std::string out =
      "level,n,negative_count,neutral_count,positive_count,negative_pct,neutral_pct,positive_pct\n";
  for (const auto& l : bundle.levels) {
    const auto& t = l.distribution.triangulated;
    out += level_name(l) + "," + std::to_string(t.n) + "," + std::to_string(t.counts[0]) + "," +
           std::to_string(t.counts[1]) + "," + std::to_string(t.counts[2]) + "," + pct1(t.pct[0]) + "," +
           pct1(t.pct[1]) + "," + pct1(t.pct[2]) + "\n";
  }
  return out;
}

std::string render_strata(const ReportBundle& bundle) {
  std::string out = "level,stratum,count,share_pct\n";
  for (const auto& l : bundle.levels) {
    for (const auto& row : l.prevalence.rows)
      out += level_name(l) + "," + std::string(to_string(row.stratum)) + "," + std::to_string(row.count) +
             "," + pct1(row.share_pct) + "\n";
    out += level_name(l) + ",total," + std::to_string(l.prevalence.total) + "," +
           (l.prevalence.total > 0 ? "100.0" : "0.0") + "\n";
  }
  return out;
}

std::string render_resolutions(const ReportBundle& bundle) {
  std::string out = "level,majority,confidence_split,fallback_model\n";
  for (const auto& l : bundle.levels)
    out += level_name(l) + "," + std::to_string(l.resolutions.majority) + "," +
           std::to_string(l.resolutions.confidence_split) + "," +
           std::to_string(l.resolutions.fallback_model) + "\n";
  return out;
}

std::string render_pairwise(const ReportBundle& bundle) {
  std::string out =
      "level,model_a,model_b,n,agreement_pct,kappa,degenerate,n_nonneutral,"
      "agreement_nonneutral_pct,kappa_nonneutral,degenerate_nonneutral\n";
  for (const auto& l : bundle.levels) {
    if (!l.agreement) continue;
    for (const auto& p : l.agreement->pairs) {
      out += level_name(l) + "," + p.model_a + "," + p.model_b + "," + std::to_string(p.full.n) + "," +
             pct1(p.full.percent_agreement) + "," + fixed(p.full.kappa, 3) + "," + flag(p.full.degenerate) +
             "," + std::to_string(p.n_nonneutral) + ",";
      if (p.nonneutral)
        out += pct1(p.nonneutral->percent_agreement) + "," + fixed(p.nonneutral->kappa, 3) + "," +
               flag(p.nonneutral->degenerate);
      else
        out += std::string(kNotAvailable) + "," + kNotAvailable + "," + kNotAvailable;
      out += "\n";
    }
  }
  return out;
}

std::string render_fleiss(const ReportBundle& bundle) {
  std::string out = "level,n,kappa,degenerate,n_nonneutral,kappa_nonneutral,degenerate_nonneutral\n";
  for (const auto& l : bundle.levels) {
    if (!l.agreement) continue;
    const auto& f = l.agreement->fleiss;
    out += level_name(l) + "," + std::to_string(f.full.n) + "," + fixed(f.full.kappa, 4) + "," +
           flag(f.full.degenerate) + "," + std::to_string(f.n_nonneutral) + ",";
    if (f.nonneutral)
      out += fixed(f.nonneutral->kappa, 4) + "," + flag(f.nonneutral->degenerate);
    else
      out += std::string(kNotAvailable) + "," + kNotAvailable;
    out += "\n";
  }
  return out;
}

std::string render_confusion(const ReportBundle& bundle) {
  std::string out =
      "level,row_model,col_model,row_label,negative,neutral,positive,row_total,"
      "negative_pct,neutral_pct,positive_pct\n";
  for (const auto& l : bundle.levels) {
    if (!l.agreement) continue;
    for (const auto& m : l.agreement->confusions)
      for (Polarity p : kPolarities) {
        const std::size_t r = index_of(p);
        out += level_name(l) + "," + m.row_model + "," + m.col_model + "," + std::string(to_string(p)) + "," +
               std::to_string(m.counts[r][0]) + "," + std::to_string(m.counts[r][1]) + "," +
               std::to_string(m.counts[r][2]) + "," + std::to_string(m.row_total(p));
        for (std::size_t c = 0; c < 3; ++c) out += "," + (m.row_empty[r] ? "empty" : pct1(m.row_pct[r][c]));
        out += "\n";
      }
  }
  return out;
}

std::string render_emotion_distribution(const LevelReport& level) {
  const auto columns = emotion_columns(level);
  std::string out = "stratum,n_units";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& p : level.emotions) {
    out += std::string(to_string(p.stratum)) + "," + std::to_string(p.n_units);
    for (const auto& c : columns) {
      auto it = p.pct.find(c);
      out += "," + pct1(it == p.pct.end() ? 0.0 : it->second);
    }
    out += "\n";
  }
  return out;
}

std::string render_emotion_confidence(const LevelReport& level) {
  const auto columns = emotion_columns(level);
  std::string out = "stratum,n_units";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& p : level.emotions) {
    out += std::string(to_string(p.stratum)) + "," + std::to_string(p.n_units);
    for (const auto& c : columns) {
      auto it = p.mean_confidence.find(c);
      out += "," + (it == p.mean_confidence.end() ? std::string(kNotAvailable) : fixed(it->second, 4));
    }
    out += "\n";
  }
  return out;
}

namespace {

json roster_json(const Roster& roster) {
  json out = json::array();
  for (const auto& m : roster.models())
    out.push_back({{"model_id", m.model_id},
                   {"label_space", to_string(m.label_space)},
                   {"neutral_capable", m.neutral_capable},
                   {"fallback", m.is_fallback}});
  return out;
}

json metadata_json(const ReportBundle& bundle) {
  json levels = json::array();
  for (const auto& l : bundle.levels) levels.push_back(to_string(l.level));
  return {{"config_hash", bundle.metadata.config_hash},
          {"seed", bundle.metadata.seed ? json(*bundle.metadata.seed) : json(nullptr)},
          {"mode", bundle.metadata.mode},
          {"rng", Xoshiro256StarStar::kName},
          {"levels", levels},
          {"roster", roster_json(bundle.roster)}};
}

json label_triple(const std::array<std::size_t, 3>& v) {
  return {{"negative", v[0]}, {"neutral", v[1]}, {"positive", v[2]}};
}

json pct_triple(const DistributionRow& row) {
  return {{"negative", row.pct[0]},
          {"neutral", row.neutral_absent ? json(nullptr) : json(row.pct[1])},
          {"positive", row.pct[2]}};
}

json kappa_json(const KappaResult& k) {
  return {{"n", k.n}, {"agreement_pct", k.percent_agreement}, {"kappa", k.kappa}, {"degenerate", k.degenerate}};
}

json optional_kappa(const std::optional<KappaResult>& k) { return k ? kappa_json(*k) : json(nullptr); }

json level_json(const LevelReport& l) {
  json models = json::array();
  for (const auto& row : l.distribution.models)
    models.push_back({{"model_id", row.model_id},
                      {"n", row.n},
                      {"counts", label_triple(row.counts)},
                      {"pct", pct_triple(row)}});
  json strata = json::array();
  for (const auto& row : l.prevalence.rows)
    strata.push_back({{"stratum", to_string(row.stratum)}, {"count", row.count}, {"share_pct", row.share_pct}});

  json agreement = nullptr;
  if (l.agreement) {
    json pairs = json::array();
    for (const auto& p : l.agreement->pairs)
      pairs.push_back({{"model_a", p.model_a},
                       {"model_b", p.model_b},
                       {"full", kappa_json(p.full)},
                       {"n_nonneutral", p.n_nonneutral},
                       {"nonneutral", optional_kappa(p.nonneutral)}});
    json confusions = json::array();
    for (const auto& m : l.agreement->confusions) {
      json counts = json::array();
      json pct = json::array();
      for (std::size_t r = 0; r < 3; ++r) {
        counts.push_back(m.counts[r]);
        pct.push_back(m.row_empty[r] ? json(nullptr) : json(m.row_pct[r]));
      }
      confusions.push_back(
          {{"row_model", m.row_model}, {"col_model", m.col_model}, {"counts", counts}, {"row_pct", pct}});
    }
    const auto& f = l.agreement->fleiss;
    agreement = {{"pairwise", pairs},
                 {"fleiss",
                  {{"full", kappa_json(f.full)},
                   {"n_nonneutral", f.n_nonneutral},
                   {"nonneutral", optional_kappa(f.nonneutral)}}},
                 {"confusion", confusions}};
  }

  json samples = json::array();
  for (const auto& m : l.manifests)
    samples.push_back({{"stratum", to_string(m.stratum)},
                       {"requested", m.requested},
                       {"eligible", m.eligible},
                       {"drawn", m.drawn.size()},
                       {"shortfall", m.shortfall()}});
  json emotions = json::array();
  for (const auto& p : l.emotions)
    emotions.push_back({{"stratum", to_string(p.stratum)},
                        {"n_units", p.n_units},
                        {"counts", p.counts},
                        {"pct", p.pct},
                        {"mean_confidence", p.mean_confidence}});

  return {{"level", to_string(l.level)},
          {"n_units", l.distribution.triangulated.n},
          {"distribution",
           {{"models", models},
            {"triangulated",
             {{"n", l.distribution.triangulated.n},
              {"counts", label_triple(l.distribution.triangulated.counts)},
              {"pct", pct_triple(l.distribution.triangulated)}}}}},
          {"strata", strata},
          {"resolutions",
           {{"majority", l.resolutions.majority},
            {"confidence_split", l.resolutions.confidence_split},
            {"fallback_model", l.resolutions.fallback_model}}},
          {"agreement", agreement},
          {"samples", samples},
          {"emotions", emotions}};
}

}  // namespace

std::string render_metadata(const ReportBundle& bundle) { return metadata_json(bundle).dump(2) + "\n"; }

std::string render_summary(const ReportBundle& bundle) {
  json levels = json::array();
  for (const auto& l : bundle.levels) levels.push_back(level_json(l));
  json doc = {{"schema_version", 1}, {"metadata", metadata_json(bundle)}, {"levels", levels}};
  return doc.dump(2) + "\n";
}

std::map<std::string, std::string> render(const ReportBundle& bundle) {
  std::map<std::string, std::string> files;
  files["distributions.csv"] = render_distributions(bundle);
  files["triangulated.csv"] = render_triangulated(bundle);
  files["strata.csv"] = render_strata(bundle);
  files["resolutions.csv"] = render_resolutions(bundle);
  files["agreement_pairwise.csv"] = render_pairwise(bundle);
  files["agreement_fleiss.csv"] = render_fleiss(bundle);
  files["confusion.csv"] = render_confusion(bundle);
  files["run_metadata.json"] = render_metadata(bundle);
  files["summary.json"] = render_summary(bundle);
  if (bundle.sampled) {
    std::vector<SampleManifest> all;
    for (const auto& l : bundle.levels) all.insert(all.end(), l.manifests.begin(), l.manifests.end());
    files["manifests.jsonl"] = serialize_manifests(all);
  }
  if (bundle.profiled)
    for (const auto& l : bundle.levels) {
      files["emotion_distribution_" + level_name(l) + ".csv"] = render_emotion_distribution(l);
      files["emotion_confidence_" + level_name(l) + ".csv"] = render_emotion_confidence(l);
    }
  return files;
}

void write_report(const ReportBundle& bundle, const std::filesystem::path& dir) {
  for (const auto& [name, bytes] : render(bundle)) write_file(dir / name, bytes);
}

}  // namespace ohsent
