#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "aspecteval/core.hpp"
#include "aspecteval/error.hpp"

namespace aspecteval {

struct EmbeddingVector {
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
  bool operator==(const EmbeddingVector& other) const { return values == other.values; }
};

// (1 + cos(u, v)) / 2, clamped into [0, 1].
// Throws Error{dimension_mismatch} and Error{zero_vector}.
double scaled_cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// A similarity measure over normalized phrases. Implementations are
// deterministic, symmetric, and return scores in [0, 1]; all are safe for
// concurrent score() calls.
class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;

  virtual std::string id() const = 0;

  // Pre-resolves anything needed to score among `phrases` (the embedding
  // backend batches its provider fetches here). Default: nothing to do.
  virtual void warm(const std::vector<NormalizedPhrase>& phrases) const { (void)phrases; }

  virtual double score(const NormalizedPhrase& a, const NormalizedPhrase& b) const = 0;
};

// Indicator of normalized equality.
class ExactScorer final : public SimilarityScorer {
 public:
  std::string id() const override { return "exact"; }
  double score(const NormalizedPhrase& a, const NormalizedPhrase& b) const override {
    return a == b ? 1.0 : 0.0;
  }
};

// Dice coefficient over character n-grams of the space-padded phrase.
// Offline fallback backend; never the default.
class CharNgramScorer final : public SimilarityScorer {
 public:
  explicit CharNgramScorer(int n = 3) : n_(n) {}
  std::string id() const override;
  double score(const NormalizedPhrase& a, const NormalizedPhrase& b) const override;

 private:
  int n_;
};

// Fixed pair scores loaded from a CSV file (phrase_a, phrase_b, sigma).
// Unlisted pairs score 1 when the normalized phrases are equal, else 0.
// Lets the whole pipeline run hermetically without an embedding provider.
class OracleScorer final : public SimilarityScorer {
 public:
  static OracleScorer from_csv(const std::filesystem::path& path);

  std::string id() const override { return "oracle"; }
  double score(const NormalizedPhrase& a, const NormalizedPhrase& b) const override;

  void set(const std::string& a, const std::string& b, double sigma);

 private:
  std::unordered_map<std::string, double> scores_;  // key: min(a,b) + '\x1f' + max(a,b)
};

// On-disk phrase -> vector cache, JSON Lines, keyed by (provider, text).
// Append-only; the last record for a key wins. Safe for concurrent readers
// with exclusive writers.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path path);  // loads existing records

  std::optional<EmbeddingVector> find(const std::string& provider, const std::string& text) const;
  std::optional<int> provider_dim(const std::string& provider) const;
  size_t size() const;

  // Appends one batch to the backing file in a single write and updates the
  // in-memory view.
  void store_batch(const std::string& provider, const std::vector<std::string>& texts,
                   const std::vector<EmbeddingVector>& vectors);

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;  // provider + '\x1f' + text
  std::unordered_map<std::string, int> dims_;
};

// One round trip to an embedding provider.
class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// POST {url}/embed with {"model": ..., "texts": [...]}; expects
// {"model": ..., "dim": n, "vectors": [[...], ...]} aligned with texts.
// Any transport error, non-200 status, or misaligned response throws
// Error{provider_unreachable}.
std::unique_ptr<EmbeddingClient> make_http_embedding_client(const std::string& url,
                                                            const std::string& model);

// Cache-first embedding lookup. Misses are fetched from `client` in batches
// of `batch_size` with at most `parallel` requests in flight, then persisted.
// Output order matches input order. With no client, a miss throws
// Error{missing_embedding}; a provider whose dimension disagrees with cached
// vectors throws Error{provider_dimension_changed}.
std::vector<EmbeddingVector> embed_batch(const std::vector<NormalizedPhrase>& phrases,
                                         const std::string& provider_id, EmbeddingCache& cache,
                                         EmbeddingClient* client, int batch_size = 64,
                                         int parallel = 4);

// Scaled cosine over provider embeddings; warm() batches fetches, score()
// falls back to a single fetch for phrases never warmed. Pair scores are
// memoized so sweeping many thresholds over one corpus embeds and scores
// each pair once.
class EmbeddingScorer final : public SimilarityScorer {
 public:
  EmbeddingScorer(std::string provider_id, std::shared_ptr<EmbeddingCache> cache,
                  std::shared_ptr<EmbeddingClient> client, int batch_size = 64, int parallel = 4);

  std::string id() const override { return "embedding:" + provider_id_; }
  void warm(const std::vector<NormalizedPhrase>& phrases) const override;
  double score(const NormalizedPhrase& a, const NormalizedPhrase& b) const override;

 private:
  EmbeddingVector vector_for(const NormalizedPhrase& phrase) const;

  std::string provider_id_;
  std::shared_ptr<EmbeddingCache> cache_;
  std::shared_ptr<EmbeddingClient> client_;
  int batch_size_;
  int parallel_;
  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<std::string, double> score_memo_;
};

struct BackendConfig {
  std::string spec = "exact";  // exact | char-ngram | embedding[:MODEL] | oracle:FILE
  std::string provider_url;    // empty: cache-only embedding lookups
  std::string cache_path;
  int batch_size = 64;
  int parallel = 4;
};

// Builds a scorer from a backend spec string. Throws Error{invalid_config}
// on unknown specs.
std::unique_ptr<SimilarityScorer> make_scorer(const BackendConfig& config);

}  // namespace aspecteval
