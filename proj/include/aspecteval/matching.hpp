#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aspecteval/core.hpp"
#include "aspecteval/similarity.hpp"

namespace aspecteval {

// Minimum similarity for a match. Valid range [0, 1].
class Theta {
 public:
  explicit Theta(double value = 0.95) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw Error(Error::Kind::invalid_config,
                  "theta must lie in [0, 1], got " + std::to_string(value));
    }
  }
  double value() const { return value_; }

 private:
  double value_;
};

struct Match {
  int gold_index;
  int detected_index;
  double similarity;
};

// One-to-one matches between a document's gold and detected aspect sets.
// Every pair has similarity >= theta; |pairs| <= min(gold_count, detected_count).
struct MatchSet {
  std::string doc_id;
  std::vector<Match> pairs;  // sorted by gold index
  int gold_count = 0;
  int detected_count = 0;
};

// Thresholded optimal matching: score all cross pairs, zero scores below
// theta, solve the min-cost assignment on 1 - score, then drop assigned pairs
// whose original score is below theta (set sizes can force the assignment
// through zeroed cells, and such pairs must not count as matches).
// Either side may be empty; inputs must be deduplicated under normalization.
MatchSet intersect(const std::vector<NormalizedPhrase>& gold,
                   const std::vector<NormalizedPhrase>& detected, Theta theta,
                   const SimilarityScorer& scorer, const std::string& doc_id = "");

// Matched pairs whose normalized phrases differ, as (detected, gold) text, in
// match order. Throws Error{index_out_of_range} when the match set does not
// belong to the given phrase lists.
std::vector<std::pair<std::string, std::string>> non_exact_pairs(
    const MatchSet& match, const std::vector<NormalizedPhrase>& gold,
    const std::vector<NormalizedPhrase>& detected);

}  // namespace aspecteval
