#include "doctest.h"
#include "fixtures.hpp"
#include "ohsent/consensus.hpp"
#include "ohsent/error.hpp"
#include "ohsent/ingest.hpp"

using namespace ohsent;
using fixtures::N;
using fixtures::P;
using fixtures::Z;

namespace {

const SentenceKey kKey{"d", 0, 0};

ConsensusRecord vote3(Polarity a, double ca, Polarity b, double cb, Polarity c, double cc,
                      const std::string& fallback = "C") {
  std::vector<Vote> votes{{"A", a, ca}, {"B", b, cb}, {"C", c, cc}};
  return triangulate_sentence(kKey, votes, fallback);
}

UtteranceAggregate agg(const std::string& model, Polarity winner, int64_t utt = 0) {
  UtteranceAggregate a;
  a.key = {"d", utt};
  a.model_id = model;
  a.winner = winner;
  a.n_sentences = 1;
  return a;
}

}  // namespace

TEST_CASE("sentence majority") {
  auto r = vote3(N, 0.9, N, 0.6, P, 0.99);
  CHECK(r.consensus == N);
  CHECK(r.resolution == Resolution::Majority);
  CHECK(r.level == Level::Sentence);
  CHECK(r.sentence_idx == 0);
  CHECK(r.model_ids == std::vector<std::string>{"A", "B", "C"});
  CHECK(r.confidences == std::vector<double>{0.9, 0.6, 0.99});
  CHECK(r.label_of("C") == P);
  CHECK_FALSE(r.label_of("D").has_value());
}

TEST_CASE("three-way split goes to the most confident model") {
  auto r = vote3(N, 0.7, Z, 0.95, P, 0.8);
  CHECK(r.consensus == Z);
  CHECK(r.resolution == Resolution::ConfidenceSplit);
}

TEST_CASE("exact confidence tie goes to the fallback model") {
  auto r = vote3(N, 0.8, Z, 0.8, P, 0.8, "C");
  CHECK(r.consensus == P);
  CHECK(r.resolution == Resolution::FallbackModel);

  // only the top confidence matters: the fallback may even be the least confident
  auto r2 = vote3(N, 0.9, Z, 0.9, P, 0.1, "C");
  CHECK(r2.consensus == P);
  CHECK(r2.resolution == Resolution::FallbackModel);

  // a tie below the top does not trigger the fallback
  auto r3 = vote3(N, 0.5, Z, 0.5, P, 0.9, "A");
  CHECK(r3.consensus == P);
  CHECK(r3.resolution == Resolution::ConfidenceSplit);
}

TEST_CASE("sentence triangulation rejects wrong rosters") {
  auto code = [](std::vector<Vote> votes, std::string fallback) {
    try {
      triangulate_sentence(kKey, votes, fallback);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IOError;
  };
  CHECK(code({{"A", N, 0.5}, {"B", N, 0.5}}, "A") == ErrorCode::WrongRosterSize);
  CHECK(code({{"A", N, 0.5}, {"B", Z, 0.5}, {"C", P, 0.5}}, "X") == ErrorCode::UnknownModel);
}

TEST_CASE("utterance triangulation uses aggregated labels only") {
  std::vector<UtteranceAggregate> unanimous{agg("A", N), agg("B", N), agg("C", N)};
  auto r = triangulate_utterance(unanimous, "A");
  CHECK(r.consensus == N);
  CHECK(r.resolution == Resolution::Majority);
  CHECK(r.level == Level::Utterance);
  CHECK_FALSE(r.sentence_idx.has_value());
  CHECK(r.confidences.empty());

  std::vector<UtteranceAggregate> two{agg("A", P), agg("B", Z), agg("C", P)};
  CHECK(triangulate_utterance(two, "A").consensus == P);

  std::vector<UtteranceAggregate> split{agg("A", N), agg("B", Z), agg("C", P)};
  auto s = triangulate_utterance(split, "A");
  CHECK(s.consensus == N);
  CHECK(s.resolution == Resolution::FallbackModel);
}

TEST_CASE("utterance triangulation rejects mismatched aggregates") {
  std::vector<UtteranceAggregate> mixed{agg("A", N), agg("B", N, 1), agg("C", N)};
  CHECK_THROWS_AS(triangulate_utterance(mixed, "A"), Error);
  std::vector<UtteranceAggregate> short_roster{agg("A", N), agg("B", N)};
  CHECK_THROWS_AS(triangulate_utterance(short_roster, "A"), Error);
}

TEST_CASE("dataset triangulation on the minimal fixture") {
  const Dataset ds = load_predictions(fixtures::kData / "valid_min.jsonl", fixtures::default_roster());
  auto tri = triangulate_dataset(ds);
  REQUIRE(tri.sentences.size() == 2);
  REQUIRE(tri.utterances.size() == 1);
  // sentence 0: siebert Neg 0.98, cardiff Neu 0.61, nlptown Neg 0.44
  CHECK(tri.sentences[0].consensus == N);
  CHECK(tri.sentences[0].resolution == Resolution::Majority);
  // sentence 1: Pos, Pos, Pos
  CHECK(tri.sentences[1].consensus == P);

  // siebert: Neg 0.98 vs Pos 0.91 -> Neg; cardiff: Neu 0.61 vs Pos 0.55 -> Neu;
  // nlptown: Neg 0.44 vs Pos 0.38 -> Neg.  Majority Neg.
  REQUIRE(tri.aggregates.size() == 1);
  CHECK(tri.aggregates[0][0].winner == N);
  CHECK(tri.aggregates[0][1].winner == Z);
  CHECK(tri.aggregates[0][2].winner == N);
  CHECK(tri.utterances[0].consensus == N);
  CHECK(tri.utterances[0].model_ids == std::vector<std::string>{"siebert", "cardiffnlp", "nlptown"});
}

TEST_CASE("dataset triangulation does not depend on worker count") {
  const Dataset ds =
      load_predictions(fixtures::kData / "minicorpus_predictions.jsonl", fixtures::default_roster());
  auto one = triangulate_dataset(ds, 1);
  auto many = triangulate_dataset(ds, 7);
  REQUIRE(one.sentences.size() == many.sentences.size());
  for (std::size_t i = 0; i < one.sentences.size(); ++i) {
    CHECK(one.sentences[i].consensus == many.sentences[i].consensus);
    CHECK(one.sentences[i].resolution == many.sentences[i].resolution);
  }
  for (std::size_t i = 0; i < one.utterances.size(); ++i)
    CHECK(one.utterances[i].consensus == many.utterances[i].consensus);
}

TEST_CASE("level and resolution names") {
  CHECK(to_string(Level::Utterance) == "utterance");
  CHECK(parse_level("sentence") == Level::Sentence);
  CHECK_FALSE(parse_level("paragraph").has_value());
  CHECK(to_string(Resolution::ConfidenceSplit) == "confidence_split");
  CHECK(parse_resolution("fallback_model") == Resolution::FallbackModel);
}
