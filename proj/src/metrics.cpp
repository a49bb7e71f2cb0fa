#include "aspecteval/metrics.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "aspecteval/detail/parallel.hpp"

namespace aspecteval {

namespace {

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

DocScores extraction_scores(const MatchSet& match) {
  DocScores scores;
  scores.doc_id = match.doc_id;
  scores.matched = static_cast<int>(match.pairs.size());
  scores.gold_count = match.gold_count;
  scores.detected_count = match.detected_count;
  if (match.gold_count == 0 && match.detected_count == 0) {
    scores.precision = scores.recall = scores.f1 = 1.0;
    return scores;
  }
  scores.precision = match.detected_count > 0
                         ? static_cast<double>(scores.matched) / match.detected_count
                         : 0.0;
  scores.recall =
      match.gold_count > 0 ? static_cast<double>(scores.matched) / match.gold_count : 0.0;
  scores.f1 = harmonic(scores.precision, scores.recall);
  return scores;
}

MacroScores macro_average(const std::vector<DocScores>& docs) {
  MacroScores macro;
  if (docs.empty()) return macro;
  for (const auto& d : docs) {
    macro.precision += d.precision;
    macro.recall += d.recall;
    macro.f1 += d.f1;
  }
  macro.precision /= static_cast<double>(docs.size());
  macro.recall /= static_cast<double>(docs.size());
  macro.f1 /= static_cast<double>(docs.size());
  macro.f1_harmonic = harmonic(macro.precision, macro.recall);
  return macro;
}

Polarity effective_polarity(Polarity p, ConflictingPolicy policy) {
  if (p == Polarity::conflicting && policy == ConflictingPolicy::fold_to_neutral) {
    return Polarity::neutral;
  }
  return p;
}

std::vector<Polarity> class_set(ConflictingPolicy policy) {
  std::vector<Polarity> classes{Polarity::positive, Polarity::negative, Polarity::neutral};
  if (policy == ConflictingPolicy::keep) classes.push_back(Polarity::conflicting);
  return classes;
}

AscReport asc_scores(const std::vector<MatchSet>& matches,
                     const std::vector<AnnotatedDocument>& corpus,
                     const std::vector<std::vector<AspectPolarityPair>>& detected_per_doc,
                     ConflictingPolicy policy) {
  AscReport report;
  const std::vector<Polarity> classes = class_set(policy);
  std::map<Polarity, AscClassScores> totals;
  for (Polarity c : classes) totals[c] = AscClassScores{};

  for (size_t d = 0; d < corpus.size(); ++d) {
    const MatchSet& match = matches[d];
    const auto& gold = corpus[d].gold;
    const auto& detected = detected_per_doc[d];

    long doc_tp = 0;
    std::vector<char> gold_matched(gold.size(), 0);
    std::vector<char> detected_matched(detected.size(), 0);
    for (const auto& pair : match.pairs) {
      gold_matched[pair.gold_index] = 1;
      detected_matched[pair.detected_index] = 1;
      Polarity g = effective_polarity(gold[pair.gold_index].polarity, policy);
      Polarity p = effective_polarity(detected[pair.detected_index].polarity, policy);
      if (g == p) {
        totals[g].tp += 1;
        doc_tp += 1;
      } else {
        totals[g].fn += 1;
        totals[p].fp += 1;
      }
    }
    for (size_t i = 0; i < gold.size(); ++i) {
      if (!gold_matched[i]) totals[effective_polarity(gold[i].polarity, policy)].fn += 1;
    }
    for (size_t j = 0; j < detected.size(); ++j) {
      if (!detected_matched[j]) totals[effective_polarity(detected[j].polarity, policy)].fp += 1;
    }

    DocScores doc;
    doc.doc_id = corpus[d].id;
    doc.matched = static_cast<int>(doc_tp);
    doc.gold_count = static_cast<int>(gold.size());
    doc.detected_count = static_cast<int>(detected.size());
    if (doc.gold_count == 0 && doc.detected_count == 0) {
      doc.precision = doc.recall = doc.f1 = 1.0;
    } else {
      doc.precision = doc.detected_count > 0 ? static_cast<double>(doc_tp) / doc.detected_count : 0.0;
      doc.recall = doc.gold_count > 0 ? static_cast<double>(doc_tp) / doc.gold_count : 0.0;
      doc.f1 = harmonic(doc.precision, doc.recall);
    }
    report.per_document.push_back(std::move(doc));
  }

  int supported = 0;
  for (Polarity c : classes) {
    AscClassScores& s = totals[c];
    s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / (s.tp + s.fp) : 0.0;
    s.recall = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
    s.f1 = harmonic(s.precision, s.recall);
    report.per_class.emplace_back(c, s);
    if (s.tp + s.fp + s.fn > 0) {
      report.macro_precision += s.precision;
      report.macro_recall += s.recall;
      report.macro_f1 += s.f1;
      ++supported;
    }
  }
  if (supported > 0) {
    report.macro_precision /= supported;
    report.macro_recall /= supported;
    report.macro_f1 /= supported;
  }
  report.document_macro = macro_average(report.per_document);
  return report;
}

EvaluationReport macro_evaluate(const std::vector<AnnotatedDocument>& corpus,
                                const std::vector<PredictionRecord>& predictions, Theta theta,
                                const SimilarityScorer& scorer, ConflictingPolicy policy,
                                int jobs) {
  std::unordered_map<std::string, const AnnotatedDocument*> by_id;
  for (const auto& doc : corpus) by_id.emplace(doc.id, &doc);
  std::unordered_map<std::string, const PredictionRecord*> pred_by_id;
  for (const auto& pred : predictions) {
    if (!by_id.count(pred.doc_id)) {
      throw Error(Error::Kind::unknown_doc_id,
                  "prediction references unknown document \"" + pred.doc_id + "\"");
    }
    pred_by_id[pred.doc_id] = &pred;
  }

  EvaluationReport report;
  report.theta = theta.value();
  report.backend_id = scorer.id();

  std::vector<std::vector<AspectPolarityPair>> detected_per_doc(corpus.size());
  for (size_t d = 0; d < corpus.size(); ++d) {
    auto it = pred_by_id.find(corpus[d].id);
    if (it == pred_by_id.end()) {
      report.warnings.push_back("no prediction for document \"" + corpus[d].id +
                                "\"; scored with an empty detected set");
    } else {
      detected_per_doc[d] = it->second->detected;
    }
  }

  const ExactScorer exact_scorer;
  const Theta exact_theta(1.0);
  std::vector<MatchSet> generalized_matches(corpus.size());
  std::vector<MatchSet> exact_matches(corpus.size());
  report.generalized.resize(corpus.size());
  report.exact.resize(corpus.size());

  detail::parallel_for_index(corpus.size(), jobs, [&](size_t d) {
    std::vector<NormalizedPhrase> gold_phrases;
    gold_phrases.reserve(corpus[d].gold.size());
    for (const auto& pair : corpus[d].gold) gold_phrases.push_back(pair.normalized);
    std::vector<NormalizedPhrase> detected_phrases;
    detected_phrases.reserve(detected_per_doc[d].size());
    for (const auto& pair : detected_per_doc[d]) detected_phrases.push_back(pair.normalized);

    generalized_matches[d] = intersect(gold_phrases, detected_phrases, theta, scorer, corpus[d].id);
    exact_matches[d] =
        intersect(gold_phrases, detected_phrases, exact_theta, exact_scorer, corpus[d].id);
    report.generalized[d] = extraction_scores(generalized_matches[d]);
    report.exact[d] = extraction_scores(exact_matches[d]);
  });

  report.macro_generalized = macro_average(report.generalized);
  report.macro_exact = macro_average(report.exact);
  report.asc = asc_scores(generalized_matches, corpus, detected_per_doc, policy);
  return report;
}

}  // namespace aspecteval
