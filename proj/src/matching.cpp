#include "aspecteval/matching.hpp"

#include <algorithm>

#include "aspecteval/assignment.hpp"

namespace aspecteval {

MatchSet intersect(const std::vector<NormalizedPhrase>& gold,
                   const std::vector<NormalizedPhrase>& detected, Theta theta,
                   const SimilarityScorer& scorer, const std::string& doc_id) {
  MatchSet result;
  result.doc_id = doc_id;
  result.gold_count = static_cast<int>(gold.size());
  result.detected_count = static_cast<int>(detected.size());
  if (gold.empty() || detected.empty()) return result;

  std::vector<NormalizedPhrase> all(gold);
  all.insert(all.end(), detected.begin(), detected.end());
  scorer.warm(all);

  const int nr = result.gold_count;
  const int nc = result.detected_count;
  std::vector<double> sigma(static_cast<size_t>(nr) * nc);
  CostMatrix cost = CostMatrix::zeros(nr, nc);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nc; ++j) {
      double s = scorer.score(gold[i], detected[j]);
      sigma[static_cast<size_t>(i) * nc + j] = s;
      double thresholded = s < theta.value() ? 0.0 : s;
      cost.at(i, j) = 1.0 - thresholded;
    }
  }

  Pairing pairing = solve_assignment(cost);
  for (const auto& [i, j] : pairing.pairs) {
    double s = sigma[static_cast<size_t>(i) * nc + j];
    if (s < theta.value()) continue;
    result.pairs.push_back(Match{i, j, s});
  }
  // pairing is row-sorted already; keep the gold-major order explicit.
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const Match& a, const Match& b) { return a.gold_index < b.gold_index; });
  return result;
}

std::vector<std::pair<std::string, std::string>> non_exact_pairs(
    const MatchSet& match, const std::vector<NormalizedPhrase>& gold,
    const std::vector<NormalizedPhrase>& detected) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& pair : match.pairs) {
    if (pair.gold_index < 0 || pair.gold_index >= static_cast<int>(gold.size()) ||
        pair.detected_index < 0 || pair.detected_index >= static_cast<int>(detected.size())) {
      throw Error(Error::Kind::index_out_of_range,
                  "match set does not belong to the given aspect sets");
    }
    const auto& g = gold[pair.gold_index];
    const auto& d = detected[pair.detected_index];
    if (g != d) out.emplace_back(d.text, g.text);
  }
  return out;
}

}  // namespace aspecteval
