#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aspecteval/core.hpp"
#include "aspecteval/matching.hpp"

namespace aspecteval {

struct DocScores {
  std::string doc_id;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int matched = 0;
  int gold_count = 0;
  int detected_count = 0;
};

// precision = |pairs| / |detected|, recall = |pairs| / |gold|, f1 their
// harmonic mean. Degenerate documents: both sides empty scores 1 across the
// board; an empty side against a non-empty one scores 0.
DocScores extraction_scores(const MatchSet& match);

struct MacroScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;           // mean of per-document f1
  double f1_harmonic = 0.0;  // harmonic mean of macro precision and recall
};

MacroScores macro_average(const std::vector<DocScores>& docs);

// How to score the conflicting polarity: fold it into neutral (the default)
// or keep it as a fourth class.
enum class ConflictingPolicy { fold_to_neutral, keep };

Polarity effective_polarity(Polarity p, ConflictingPolicy policy);
std::vector<Polarity> class_set(ConflictingPolicy policy);

struct AscClassScores {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;  // 0 when tp + fp = 0
  double recall = 0.0;     // 0 when tp + fn = 0
  double f1 = 0.0;
};

// Sentiment classification scored only over matched aspects: a matched pair
// with agreeing polarity is a true positive for that class; a matched pair
// with disagreeing polarities is a false negative for the gold class and a
// false positive for the predicted class; unmatched gold aspects are false
// negatives, unmatched detections false positives.
struct AscReport {
  std::vector<std::pair<Polarity, AscClassScores>> per_class;
  double macro_precision = 0.0;  // over classes with any support
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<DocScores> per_document;  // doc-level tp/|detected|, tp/|gold|
  MacroScores document_macro;
};

AscReport asc_scores(const std::vector<MatchSet>& matches,
                     const std::vector<AnnotatedDocument>& corpus,
                     const std::vector<std::vector<AspectPolarityPair>>& detected_per_doc,
                     ConflictingPolicy policy = ConflictingPolicy::fold_to_neutral);

struct EvaluationReport {
  double theta = 0.95;
  std::string backend_id;
  std::vector<DocScores> generalized;  // chosen backend at theta
  std::vector<DocScores> exact;        // exact backend at theta = 1
  MacroScores macro_generalized;
  MacroScores macro_exact;
  AscReport asc;
  std::vector<std::string> warnings;
};

// Scores every corpus document. Predictions are joined by doc id; a document
// without a prediction is scored against an empty detected set (recorded as a
// warning). A prediction whose doc id is not in the corpus throws
// Error{unknown_doc_id}.
EvaluationReport macro_evaluate(const std::vector<AnnotatedDocument>& corpus,
                                const std::vector<PredictionRecord>& predictions, Theta theta,
                                const SimilarityScorer& scorer,
                                ConflictingPolicy policy = ConflictingPolicy::fold_to_neutral,
                                int jobs = 1);

}  // namespace aspecteval
