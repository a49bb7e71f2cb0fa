#include "aspecteval/similarity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aspecteval/detail/csv.hpp"

namespace aspecteval {

namespace {

std::string cache_key(const std::string& provider, const std::string& text) {
  return provider + '\x1f' + text;
}

std::string pair_key(const std::string& a, const std::string& b) {
  return a <= b ? a + '\x1f' + b : b + '\x1f' + a;
}

}  // namespace

double scaled_cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(Error::Kind::dimension_mismatch,
                "embedding dimensions differ: " + std::to_string(u.dim()) + " vs " +
                    std::to_string(v.dim()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (int i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    throw Error(Error::Kind::zero_vector, "cosine undefined for an all-zero vector");
  }
  double cosine = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp((1.0 + cosine) / 2.0, 0.0, 1.0);
}

std::string CharNgramScorer::id() const { return "char-ngram:" + std::to_string(n_); }

double CharNgramScorer::score(const NormalizedPhrase& a, const NormalizedPhrase& b) const {
  if (a == b) return 1.0;
  // Multisets of n-grams over the space-padded phrase; padding gives short
  // phrases at least one gram.
  auto grams = [this](const std::string& text) {
    std::map<std::string, int> counts;
    std::string padded = " " + text + " ";
    if (static_cast<int>(padded.size()) < n_) {
      counts[padded] = 1;
      return counts;
    }
    for (size_t i = 0; i + n_ <= padded.size(); ++i) counts[padded.substr(i, n_)] += 1;
    return counts;
  };
  auto ga = grams(a.text);
  auto gb = grams(b.text);
  long total_a = 0, total_b = 0, shared = 0;
  for (const auto& [g, n] : ga) total_a += n;
  for (const auto& [g, n] : gb) total_b += n;
  for (const auto& [g, n] : ga) {
    auto it = gb.find(g);
    if (it != gb.end()) shared += std::min(n, it->second);
  }
  return std::clamp(2.0 * static_cast<double>(shared) / static_cast<double>(total_a + total_b), 0.0,
                    1.0);
}

OracleScorer OracleScorer::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Error::Kind::parse_error, "cannot open oracle file: " + path.string());
  }
  OracleScorer scorer;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) {
      throw Error(Error::Kind::parse_error,
                  path.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
    }
    char* end = nullptr;
    double sigma = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0') {
      if (lineno == 1) continue;  // header row
      throw Error(Error::Kind::parse_error,
                  path.string() + ":" + std::to_string(lineno) + ": bad similarity value");
    }
    if (sigma < 0.0 || sigma > 1.0) {
      throw Error(Error::Kind::parse_error,
                  path.string() + ":" + std::to_string(lineno) + ": similarity outside [0,1]");
    }
    scorer.set(fields[0], fields[1], sigma);
  }
  return scorer;
}

void OracleScorer::set(const std::string& a, const std::string& b, double sigma) {
  scores_[pair_key(normalize_phrase(a).text, normalize_phrase(b).text)] = sigma;
}

double OracleScorer::score(const NormalizedPhrase& a, const NormalizedPhrase& b) const {
  auto it = scores_.find(pair_key(a.text, b.text));
  if (it != scores_.end()) return it->second;
  return a == b ? 1.0 : 0.0;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // fresh cache
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("provider") || !record.contains("text") ||
        !record.contains("vector")) {
      throw Error(Error::Kind::parse_error,
                  path_.string() + ":" + std::to_string(lineno) + ": bad cache record");
    }
    EmbeddingVector vec{record["vector"].get<std::vector<double>>()};
    std::string provider = record["provider"].get<std::string>();
    dims_[provider] = vec.dim();
    entries_[cache_key(provider, record["text"].get<std::string>())] = std::move(vec);
  }
}

std::optional<EmbeddingVector> EmbeddingCache::find(const std::string& provider,
                                                    const std::string& text) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(cache_key(provider, text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> EmbeddingCache::provider_dim(const std::string& provider) const {
  std::shared_lock lock(mutex_);
  auto it = dims_.find(provider);
  if (it == dims_.end()) return std::nullopt;
  return it->second;
}

size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void EmbeddingCache::store_batch(const std::string& provider,
                                 const std::vector<std::string>& texts,
                                 const std::vector<EmbeddingVector>& vectors) {
  if (texts.size() != vectors.size()) {
    throw Error(Error::Kind::length_mismatch, "texts and vectors differ in length");
  }
  std::unique_lock lock(mutex_);
  std::string block;
  for (size_t i = 0; i < texts.size(); ++i) {
    nlohmann::ordered_json record;
    record["provider"] = provider;
    record["text"] = texts[i];
    record["dim"] = vectors[i].dim();
    record["vector"] = vectors[i].values;
    block += record.dump();
    block += '\n';
  }
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << block << std::flush;
  }
  for (size_t i = 0; i < texts.size(); ++i) {
    dims_[provider] = vectors[i].dim();
    entries_[cache_key(provider, texts[i])] = vectors[i];
  }
}

namespace {

class HttpEmbeddingClient final : public EmbeddingClient {
 public:
  HttpEmbeddingClient(std::string url, std::string model)
      : url_(std::move(url)), model_(std::move(model)) {}

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
    nlohmann::json body;
    body["model"] = model_;
    body["texts"] = texts;

    httplib::Client client(url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    auto response = client.Post("/embed", body.dump(), "application/json");
    if (!response) {
      throw Error(Error::Kind::provider_unreachable,
                  "embedding provider at " + url_ + " not reachable");
    }
    if (response->status != 200) {
      throw Error(Error::Kind::provider_unreachable,
                  "embedding provider returned status " + std::to_string(response->status));
    }
    nlohmann::json parsed = nlohmann::json::parse(response->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("dim") || !parsed.contains("vectors") ||
        !parsed["vectors"].is_array()) {
      throw Error(Error::Kind::provider_unreachable, "embedding provider sent a malformed body");
    }
    if (parsed["vectors"].size() != texts.size()) {
      throw Error(Error::Kind::provider_unreachable,
                  "embedding provider returned " + std::to_string(parsed["vectors"].size()) +
                      " vectors for " + std::to_string(texts.size()) + " texts");
    }
    int dim = parsed["dim"].get<int>();
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(texts.size());
    for (const auto& raw : parsed["vectors"]) {
      EmbeddingVector vec{raw.get<std::vector<double>>()};
      if (vec.dim() != dim) {
        throw Error(Error::Kind::provider_unreachable,
                    "embedding provider vector length disagrees with its declared dim");
      }
      vectors.push_back(std::move(vec));
    }
    return vectors;
  }

 private:
  std::string url_;
  std::string model_;
};

}  // namespace

std::unique_ptr<EmbeddingClient> make_http_embedding_client(const std::string& url,
                                                            const std::string& model) {
  return std::make_unique<HttpEmbeddingClient>(url, model);
}

std::vector<EmbeddingVector> embed_batch(const std::vector<NormalizedPhrase>& phrases,
                                         const std::string& provider_id, EmbeddingCache& cache,
                                         EmbeddingClient* client, int batch_size, int parallel) {
  if (phrases.empty()) {
    throw Error(Error::Kind::empty_input, "embed_batch needs at least one phrase");
  }

  // Unique miss list in first-seen order.
  std::vector<std::string> misses;
  {
    std::unordered_map<std::string, bool> seen;
    for (const auto& phrase : phrases) {
      if (seen.count(phrase.text)) continue;
      seen[phrase.text] = true;
      if (!cache.find(provider_id, phrase.text)) misses.push_back(phrase.text);
    }
  }

  if (!misses.empty()) {
    if (client == nullptr) {
      throw Error(Error::Kind::missing_embedding,
                  "no cached vector for \"" + misses.front() + "\" and no provider configured");
    }
    std::vector<std::vector<std::string>> batches;
    for (size_t i = 0; i < misses.size(); i += batch_size) {
      batches.emplace_back(misses.begin() + i,
                           misses.begin() + std::min(misses.size(), i + batch_size));
    }
    std::vector<std::vector<EmbeddingVector>> results(batches.size());
    std::vector<std::exception_ptr> failures(batches.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        size_t index = next.fetch_add(1);
        if (index >= batches.size()) return;
        try {
          results[index] = client->embed(batches[index]);
        } catch (...) {
          failures[index] = std::current_exception();
        }
      }
    };
    int threads = std::clamp(parallel, 1, static_cast<int>(batches.size()));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }

    std::optional<int> expected_dim = cache.provider_dim(provider_id);
    for (size_t i = 0; i < batches.size(); ++i) {
      for (const auto& vec : results[i]) {
        if (expected_dim && vec.dim() != *expected_dim) {
          throw Error(Error::Kind::provider_dimension_changed,
                      "provider \"" + provider_id + "\" now returns dim " +
                          std::to_string(vec.dim()) + ", cache has dim " +
                          std::to_string(*expected_dim));
        }
        if (!expected_dim) expected_dim = vec.dim();
      }
    }
    // One flush per batch keeps each append atomic with respect to readers.
    for (size_t i = 0; i < batches.size(); ++i) cache.store_batch(provider_id, batches[i], results[i]);
  }

  std::vector<EmbeddingVector> out;
  out.reserve(phrases.size());
  for (const auto& phrase : phrases) {
    auto hit = cache.find(provider_id, phrase.text);
    if (!hit) {
      throw Error(Error::Kind::missing_embedding, "vector missing after fetch: " + phrase.text);
    }
    out.push_back(std::move(*hit));
  }
  return out;
}

EmbeddingScorer::EmbeddingScorer(std::string provider_id, std::shared_ptr<EmbeddingCache> cache,
                                 std::shared_ptr<EmbeddingClient> client, int batch_size,
                                 int parallel)
    : provider_id_(std::move(provider_id)),
      cache_(std::move(cache)),
      client_(std::move(client)),
      batch_size_(batch_size),
      parallel_(parallel) {}

void EmbeddingScorer::warm(const std::vector<NormalizedPhrase>& phrases) const {
  if (phrases.empty()) return;
  embed_batch(phrases, provider_id_, *cache_, client_.get(), batch_size_, parallel_);
}

EmbeddingVector EmbeddingScorer::vector_for(const NormalizedPhrase& phrase) const {
  if (auto hit = cache_->find(provider_id_, phrase.text)) return std::move(*hit);
  return embed_batch({phrase}, provider_id_, *cache_, client_.get(), batch_size_, parallel_)[0];
}

double EmbeddingScorer::score(const NormalizedPhrase& a, const NormalizedPhrase& b) const {
  std::string key = pair_key(a.text, b.text);
  {
    std::shared_lock lock(memo_mutex_);
    auto it = score_memo_.find(key);
    if (it != score_memo_.end()) return it->second;
  }
  double s = scaled_cosine(vector_for(a), vector_for(b));
  std::unique_lock lock(memo_mutex_);
  score_memo_.emplace(std::move(key), s);
  return s;
}

std::unique_ptr<SimilarityScorer> make_scorer(const BackendConfig& config) {
  const std::string& spec = config.spec;
  if (spec == "exact") return std::make_unique<ExactScorer>();
  if (spec == "char-ngram") return std::make_unique<CharNgramScorer>();
  if (spec.rfind("oracle:", 0) == 0) {
    return std::make_unique<OracleScorer>(OracleScorer::from_csv(spec.substr(7)));
  }
  if (spec == "embedding" || spec.rfind("embedding:", 0) == 0) {
    std::string model = spec == "embedding" ? "sentence-t5-large" : spec.substr(10);
    auto cache = std::make_shared<EmbeddingCache>(
        config.cache_path.empty() ? std::filesystem::path{} : std::filesystem::path(config.cache_path));
    std::shared_ptr<EmbeddingClient> client;
    if (!config.provider_url.empty()) {
      client = make_http_embedding_client(config.provider_url, model);
    }
    return std::make_unique<EmbeddingScorer>(model, cache, client, config.batch_size,
                                             config.parallel);
  }
  throw Error(Error::Kind::invalid_config, "unknown similarity backend: " + spec);
}

}  // namespace aspecteval
