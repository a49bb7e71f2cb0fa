#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aspecteval/core.hpp"
#include "aspecteval/matching.hpp"

namespace aspecteval {

struct BootstrapResult {
  double observed_delta = 0.0;
  double p_value = 1.0;
  long iterations = 0;
  uint64_t seed = 0;
};

// Paired bootstrap over documents. Observed delta is mean(a) - mean(b); each
// iteration resamples document indices with replacement and recomputes the
// delta; the p-value is the fraction of iterations whose resampled delta is
// at least twice the observed one.
//
// Randomness: iteration i draws its indices from a splitmix64 stream seeded
// with mix(seed, i), so results are bit-reproducible for a given seed and
// independent of thread count.
BootstrapResult paired_bootstrap(const std::vector<double>& scores_a,
                                 const std::vector<double>& scores_b, long iterations,
                                 uint64_t seed, int jobs = 1);

// items x categories count matrix; every row sums to the common rater count.
struct RatingsTable {
  std::vector<std::string> items;
  std::vector<std::string> categories;
  std::vector<std::vector<long>> counts;
  long raters = 0;
};

struct KappaResult {
  double kappa = 0.0;
  // All raters put every item in one category: chance agreement is total and
  // the statistic is undefined; reported as 1 with this flag set.
  bool degenerate_agreement = false;
};

KappaResult fleiss_kappa(const RatingsTable& table);

struct RatingRecord {
  std::string item;
  std::string rater;
  std::string value;
};

struct BinSpec {
  enum class Mode { none, quartiles, explicit_edges };
  Mode mode = Mode::none;
  std::vector<double> edges;  // strictly increasing interior cut points
};

// Groups (item, rater, value) records into a RatingsTable. Rater counts must
// be constant across items (Error{ragged_ratings}). With binning, values must
// be numeric and are discretized into len(edges)+1 labeled intervals;
// quartile mode derives three cut points from the pooled values.
RatingsTable build_ratings_table(const std::vector<RatingRecord>& records, const BinSpec& bins);

struct SweepRow {
  double theta = 0.0;
  long matched_total = 0;   // matched pairs summed over systems and documents
  long nonexact_union = 0;  // distinct matched pairs with differing surface forms
  long exact_total = 0;     // case-insensitive intersection total (theta-independent)
};

struct SweepPairRecord {
  double theta;
  std::string system;
  std::string doc_id;
  std::string detected;
  std::string gold;
  double similarity;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepPairRecord> pairs;  // sorted by theta, system, doc, similarity desc
};

struct SystemPredictions {
  std::string system_id;
  std::vector<PredictionRecord> predictions;
};

// For each grid threshold, matches every system against the corpus, collects
// the matched pairs whose surface forms differ, and dedupes them across
// systems. The pair dump lists every occurrence for manual review. Grid must
// be strictly increasing within (0, 1].
SweepResult theta_sweep(const std::vector<AnnotatedDocument>& corpus,
                        const std::vector<SystemPredictions>& systems,
                        const std::vector<Theta>& grid, const SimilarityScorer& scorer,
                        int jobs = 1);

}  // namespace aspecteval
