#include "aspecteval/metrics.hpp"

#include <gtest/gtest.h>

#include <array>
#include <random>

#include "testutil.hpp"

using namespace aspecteval;

namespace {

MatchSet fake_match(int matched, int gold_count, int detected_count) {
  MatchSet m;
  m.gold_count = gold_count;
  m.detected_count = detected_count;
  for (int i = 0; i < matched; ++i) m.pairs.push_back(Match{i, i, 1.0});
  return m;
}

AnnotatedDocument doc(const std::string& id,
                      const std::vector<std::pair<std::string, Polarity>>& gold) {
  AnnotatedDocument d;
  d.id = id;
  d.text = "text of " + id;
  for (const auto& [aspect, polarity] : gold) d.gold.push_back(make_pair(aspect, polarity));
  return d;
}

PredictionRecord pred(const std::string& id,
                      const std::vector<std::pair<std::string, Polarity>>& detected) {
  PredictionRecord p;
  p.doc_id = id;
  for (const auto& [aspect, polarity] : detected) p.detected.push_back(make_pair(aspect, polarity));
  return p;
}

// Builds a corpus + predictions whose per-document (gold, detected, matched)
// counts are exactly the requested triples under the exact backend: overlap
// phrases are shared, the rest are unique fillers.
void synthetic_counts(const std::vector<std::array<int, 3>>& triples,
                      std::vector<AnnotatedDocument>* corpus,
                      std::vector<PredictionRecord>* predictions) {
  for (size_t d = 0; d < triples.size(); ++d) {
    auto [gold_count, detected_count, matched] = triples[d];
    std::string id = "doc-" + std::to_string(d);
    std::vector<std::pair<std::string, Polarity>> gold, detected;
    for (int i = 0; i < matched; ++i) {
      std::string shared = id + "-shared-" + std::to_string(i);
      gold.emplace_back(shared, Polarity::positive);
      detected.emplace_back(shared, Polarity::positive);
    }
    for (int i = matched; i < gold_count; ++i)
      gold.emplace_back(id + "-gold-only-" + std::to_string(i), Polarity::negative);
    for (int i = matched; i < detected_count; ++i)
      detected.emplace_back(id + "-detected-only-" + std::to_string(i), Polarity::negative);
    corpus->push_back(doc(id, gold));
    predictions->push_back(pred(id, detected));
  }
}

}  // namespace

TEST(ExtractionScores, FigureFixture) {
  auto oracle = testutil::figure_oracle();
  MatchSet match = intersect(testutil::phrases(testutil::figure_gold()),
                             testutil::phrases(testutil::figure_detected()), Theta(0.95), oracle,
                             "figure");
  DocScores scores = extraction_scores(match);
  EXPECT_DOUBLE_EQ(scores.precision, 0.60);
  EXPECT_DOUBLE_EQ(scores.recall, 0.75);
  EXPECT_NEAR(scores.f1, 2.0 / 3.0, 1e-12);
}

TEST(ExtractionScores, DegenerateDocuments) {
  DocScores both_empty = extraction_scores(fake_match(0, 0, 0));
  EXPECT_DOUBLE_EQ(both_empty.precision, 1.0);
  EXPECT_DOUBLE_EQ(both_empty.recall, 1.0);
  EXPECT_DOUBLE_EQ(both_empty.f1, 1.0);

  DocScores no_detections = extraction_scores(fake_match(0, 3, 0));
  EXPECT_DOUBLE_EQ(no_detections.precision, 0.0);
  EXPECT_DOUBLE_EQ(no_detections.recall, 0.0);
  EXPECT_DOUBLE_EQ(no_detections.f1, 0.0);

  DocScores no_gold = extraction_scores(fake_match(0, 0, 2));
  EXPECT_DOUBLE_EQ(no_gold.precision, 0.0);
  EXPECT_DOUBLE_EQ(no_gold.recall, 0.0);

  DocScores zero_matches = extraction_scores(fake_match(0, 3, 2));
  EXPECT_DOUBLE_EQ(zero_matches.precision, 0.0);
  EXPECT_DOUBLE_EQ(zero_matches.recall, 0.0);
  EXPECT_DOUBLE_EQ(zero_matches.f1, 0.0);
}

TEST(ExtractionScores, BoundsAndF1ZeroIffNoMatches) {
  std::mt19937 gen(8);
  for (int trial = 0; trial < 2000; ++trial) {
    int gold_count = static_cast<int>(gen() % 6);
    int detected_count = static_cast<int>(gen() % 6);
    int matched = std::min(gold_count, detected_count) > 0
                      ? static_cast<int>(gen() % (std::min(gold_count, detected_count) + 1))
                      : 0;
    DocScores s = extraction_scores(fake_match(matched, gold_count, detected_count));
    EXPECT_GE(s.precision, 0.0);
    EXPECT_LE(s.precision, 1.0);
    EXPECT_GE(s.recall, 0.0);
    EXPECT_LE(s.recall, 1.0);
    EXPECT_GE(s.f1, 0.0);
    EXPECT_LE(s.f1, 1.0);
    if (gold_count + detected_count > 0) {
      EXPECT_EQ(s.f1 == 0.0, matched == 0);
    }
  }
}

TEST(MacroEvaluate, MeanOfPerDocumentScores) {
  std::vector<AnnotatedDocument> corpus;
  std::vector<PredictionRecord> predictions;
  synthetic_counts({{2, 2, 2}, {3, 2, 0}}, &corpus, &predictions);
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);
  EXPECT_DOUBLE_EQ(report.macro_generalized.precision, 0.5);
  EXPECT_DOUBLE_EQ(report.macro_generalized.recall, 0.5);
  EXPECT_DOUBLE_EQ(report.macro_generalized.f1, 0.5);
}

TEST(MacroEvaluate, PerfectSystemScoresOne) {
  std::vector<AnnotatedDocument> corpus;
  std::vector<PredictionRecord> predictions;
  synthetic_counts({{2, 2, 2}, {1, 1, 1}, {0, 0, 0}}, &corpus, &predictions);
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(1.0), exact);
  EXPECT_DOUBLE_EQ(report.macro_generalized.precision, 1.0);
  EXPECT_DOUBLE_EQ(report.macro_generalized.recall, 1.0);
  EXPECT_DOUBLE_EQ(report.macro_generalized.f1, 1.0);
  EXPECT_DOUBLE_EQ(report.macro_exact.f1, 1.0);
}

// Ten documents with known counts; the macro values below were computed by
// hand from p = m/d, r = m/g (163/300, 299/600, 23/45).
TEST(MacroEvaluate, TenDocumentFixtureMatchesHandComputation) {
  std::vector<AnnotatedDocument> corpus;
  std::vector<PredictionRecord> predictions;
  synthetic_counts({{4, 5, 3},
                    {2, 2, 2},
                    {3, 2, 0},
                    {0, 0, 0},
                    {0, 2, 0},
                    {2, 0, 0},
                    {1, 1, 1},
                    {5, 4, 2},
                    {3, 3, 1},
                    {4, 2, 2}},
                   &corpus, &predictions);
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);

  ASSERT_EQ(report.generalized.size(), 10u);
  EXPECT_DOUBLE_EQ(report.generalized[0].precision, 0.6);
  EXPECT_DOUBLE_EQ(report.generalized[0].recall, 0.75);
  EXPECT_NEAR(report.generalized[0].f1, 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.generalized[7].precision, 0.5);
  EXPECT_DOUBLE_EQ(report.generalized[7].recall, 0.4);
  EXPECT_NEAR(report.generalized[7].f1, 4.0 / 9.0, 1e-12);
  EXPECT_NEAR(report.generalized[8].f1, 1.0 / 3.0, 1e-12);

  EXPECT_NEAR(report.macro_generalized.precision, 163.0 / 300.0, 1e-12);
  EXPECT_NEAR(report.macro_generalized.recall, 299.0 / 600.0, 1e-12);
  EXPECT_NEAR(report.macro_generalized.f1, 23.0 / 45.0, 1e-12);
}

TEST(MacroEvaluate, MissingPredictionScoredEmptyWithWarning) {
  std::vector<AnnotatedDocument> corpus = {doc("a", {{"food", Polarity::positive}}),
                                           doc("b", {{"wifi", Polarity::negative}})};
  std::vector<PredictionRecord> predictions = {pred("a", {{"food", Polarity::positive}})};
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);
  ASSERT_EQ(report.warnings.size(), 1u);
  EXPECT_NE(report.warnings[0].find("\"b\""), std::string::npos);
  EXPECT_DOUBLE_EQ(report.generalized[1].recall, 0.0);
  EXPECT_EQ(report.generalized[1].detected_count, 0);
}

TEST(MacroEvaluate, UnknownPredictionIdRejected) {
  std::vector<AnnotatedDocument> corpus = {doc("a", {})};
  std::vector<PredictionRecord> predictions = {pred("ghost", {})};
  ExactScorer exact;
  try {
    macro_evaluate(corpus, predictions, Theta(0.95), exact);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::unknown_doc_id);
  }
}

TEST(MacroEvaluate, ExactMatchEqualsExactBackendAtThetaOneBitwise) {
  std::mt19937 gen(2718);
  const std::vector<std::string> vocab = {"food", "wifi", "staff", "ac",   "parking",
                                          "music", "menu", "price", "decor", "queue"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AnnotatedDocument> corpus;
    std::vector<PredictionRecord> predictions;
    int docs = 1 + static_cast<int>(gen() % 8);
    for (int d = 0; d < docs; ++d) {
      std::string id = "doc-" + std::to_string(d);
      std::vector<std::pair<std::string, Polarity>> gold, detected;
      for (const auto& word : vocab) {
        if (gen() % 3 == 0) gold.emplace_back(word, Polarity::positive);
        if (gen() % 3 == 0) detected.emplace_back(word, Polarity::positive);
      }
      corpus.push_back(doc(id, gold));
      predictions.push_back(pred(id, detected));
    }
    ExactScorer exact;
    EvaluationReport at_95 = macro_evaluate(corpus, predictions, Theta(0.95), exact);
    EvaluationReport at_1 = macro_evaluate(corpus, predictions, Theta(1.0), exact);
    // The exact-match block is the same computation as the generalized one at
    // theta = 1 with the exact backend.
    for (size_t d = 0; d < corpus.size(); ++d) {
      EXPECT_EQ(at_95.exact[d].precision, at_1.generalized[d].precision);
      EXPECT_EQ(at_95.exact[d].recall, at_1.generalized[d].recall);
      EXPECT_EQ(at_95.exact[d].f1, at_1.generalized[d].f1);
    }
    EXPECT_EQ(at_95.macro_exact.f1, at_1.macro_generalized.f1);
  }
}

// Raising theta to 1 can only drop matches, never add them.
TEST(MacroEvaluate, MatchedCountsShrinkFromTheta95ToTheta1) {
  std::mt19937 gen(1618);
  const std::vector<std::string> vocab = {"air conditioner", "air conditioning", "food",
                                          "food stalls",     "wifi",             "wifi signal",
                                          "schedule",        "scheduling"};
  CharNgramScorer ngram;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<AnnotatedDocument> corpus;
    std::vector<PredictionRecord> predictions;
    int docs = 1 + static_cast<int>(gen() % 6);
    for (int d = 0; d < docs; ++d) {
      std::string id = "doc-" + std::to_string(d);
      std::vector<std::pair<std::string, Polarity>> gold, detected;
      for (const auto& word : vocab) {
        if (gen() % 3 == 0) gold.emplace_back(word, Polarity::neutral);
        if (gen() % 3 == 0) detected.emplace_back(word, Polarity::neutral);
      }
      corpus.push_back(doc(id, gold));
      predictions.push_back(pred(id, detected));
    }
    EvaluationReport at_95 = macro_evaluate(corpus, predictions, Theta(0.95), ngram);
    EvaluationReport at_1 = macro_evaluate(corpus, predictions, Theta(1.0), ngram);
    for (size_t d = 0; d < corpus.size(); ++d) {
      EXPECT_LE(at_1.generalized[d].matched, at_95.generalized[d].matched);
    }
  }
}

TEST(MacroEvaluate, ParallelScoringMatchesSequential) {
  std::vector<AnnotatedDocument> corpus;
  std::vector<PredictionRecord> predictions;
  synthetic_counts({{4, 5, 3}, {2, 2, 2}, {3, 2, 0}, {0, 0, 0}, {5, 4, 2}, {3, 3, 1}},
                   &corpus, &predictions);
  ExactScorer exact;
  EvaluationReport sequential = macro_evaluate(corpus, predictions, Theta(0.95), exact,
                                               ConflictingPolicy::fold_to_neutral, 1);
  EvaluationReport parallel = macro_evaluate(corpus, predictions, Theta(0.95), exact,
                                             ConflictingPolicy::fold_to_neutral, 4);
  ASSERT_EQ(sequential.generalized.size(), parallel.generalized.size());
  for (size_t d = 0; d < sequential.generalized.size(); ++d) {
    EXPECT_EQ(sequential.generalized[d].f1, parallel.generalized[d].f1);
    EXPECT_EQ(sequential.generalized[d].doc_id, parallel.generalized[d].doc_id);
  }
  EXPECT_EQ(sequential.macro_generalized.f1, parallel.macro_generalized.f1);
}

TEST(AscScores, PerfectAgreementScoresOne) {
  std::vector<AnnotatedDocument> corpus = {
      doc("a", {{"food", Polarity::positive}, {"wifi", Polarity::negative}})};
  std::vector<PredictionRecord> predictions = {
      pred("a", {{"food", Polarity::positive}, {"wifi", Polarity::negative}})};
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);
  for (const auto& [polarity, scores] : report.asc.per_class) {
    if (scores.tp + scores.fp + scores.fn == 0) continue;
    EXPECT_DOUBLE_EQ(scores.precision, 1.0) << to_string(polarity);
    EXPECT_DOUBLE_EQ(scores.recall, 1.0);
    EXPECT_DOUBLE_EQ(scores.f1, 1.0);
  }
  EXPECT_DOUBLE_EQ(report.asc.macro_f1, 1.0);
}

TEST(AscScores, NoMatchesMeansZeroRecall) {
  std::vector<AnnotatedDocument> corpus = {
      doc("a", {{"food", Polarity::positive}, {"wifi", Polarity::neutral}})};
  std::vector<PredictionRecord> predictions = {pred("a", {{"parking", Polarity::positive}})};
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);
  for (const auto& [polarity, scores] : report.asc.per_class) {
    if (scores.fn > 0) EXPECT_DOUBLE_EQ(scores.recall, 0.0) << to_string(polarity);
  }
}

TEST(AscScores, PolarityDisagreementCountsBothWays) {
  std::vector<AnnotatedDocument> corpus = {doc("a", {{"service", Polarity::positive}})};
  std::vector<PredictionRecord> predictions = {pred("a", {{"service", Polarity::negative}})};
  ExactScorer exact;
  EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);
  for (const auto& [polarity, scores] : report.asc.per_class) {
    if (polarity == Polarity::positive) {
      EXPECT_EQ(scores.tp, 0);
      EXPECT_EQ(scores.fn, 1);
      EXPECT_EQ(scores.fp, 0);
      EXPECT_DOUBLE_EQ(scores.precision, 0.0);
      EXPECT_DOUBLE_EQ(scores.recall, 0.0);
    } else if (polarity == Polarity::negative) {
      EXPECT_EQ(scores.tp, 0);
      EXPECT_EQ(scores.fp, 1);
      EXPECT_EQ(scores.fn, 0);
      EXPECT_DOUBLE_EQ(scores.precision, 0.0);
      EXPECT_DOUBLE_EQ(scores.recall, 0.0);
    }
  }
}

TEST(AscScores, ConflictingFoldsToNeutralByDefault) {
  std::vector<AnnotatedDocument> corpus = {doc("a", {{"service", Polarity::conflicting}})};
  std::vector<PredictionRecord> predictions = {pred("a", {{"service", Polarity::neutral}})};
  ExactScorer exact;
  EvaluationReport folded = macro_evaluate(corpus, predictions, Theta(0.95), exact,
                                           ConflictingPolicy::fold_to_neutral);
  for (const auto& [polarity, scores] : folded.asc.per_class) {
    if (polarity == Polarity::neutral) EXPECT_EQ(scores.tp, 1);
  }
  EvaluationReport strict =
      macro_evaluate(corpus, predictions, Theta(0.95), exact, ConflictingPolicy::keep);
  for (const auto& [polarity, scores] : strict.asc.per_class) {
    if (polarity == Polarity::conflicting) EXPECT_EQ(scores.fn, 1);
    if (polarity == Polarity::neutral) EXPECT_EQ(scores.fp, 1);
  }
}

// Matched pairs split exactly into agreeing and disagreeing ones.
TEST(AscScores, CountsTieOutAgainstMatchedPairs) {
  std::mt19937 gen(404);
  const std::vector<std::string> vocab = {"food", "wifi", "staff", "ac", "menu", "price"};
  const Polarity classes[3] = {Polarity::positive, Polarity::negative, Polarity::neutral};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AnnotatedDocument> corpus;
    std::vector<PredictionRecord> predictions;
    int docs = 1 + static_cast<int>(gen() % 5);
    for (int d = 0; d < docs; ++d) {
      std::string id = "doc-" + std::to_string(d);
      std::vector<std::pair<std::string, Polarity>> gold, detected;
      for (const auto& word : vocab) {
        if (gen() % 2) gold.emplace_back(word, classes[gen() % 3]);
        if (gen() % 2) detected.emplace_back(word, classes[gen() % 3]);
      }
      corpus.push_back(doc(id, gold));
      predictions.push_back(pred(id, detected));
    }
    ExactScorer exact;
    EvaluationReport report = macro_evaluate(corpus, predictions, Theta(0.95), exact);
    long matched_total = 0;
    for (const auto& d : report.generalized) matched_total += d.matched;
    long tp_total = 0, disagreements = 0;
    for (const auto& [polarity, scores] : report.asc.per_class) tp_total += scores.tp;
    // Disagreeing matched pairs are exactly the fn entries that came from a
    // matched pair; recover them as matched_total - tp_total and cross-check
    // against per-document asc counts.
    long asc_correct = 0;
    for (const auto& d : report.asc.per_document) asc_correct += d.matched;
    EXPECT_EQ(tp_total, asc_correct);
    disagreements = matched_total - tp_total;
    EXPECT_GE(disagreements, 0);
  }
}
