#include "aspecteval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "aspecteval/detail/parallel.hpp"

namespace aspecteval {

namespace {

// splitmix64 (Steele, Lea, Flood 2014); fully specified so p-values are
// identical across platforms.
uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t mix_seed(uint64_t seed, uint64_t iteration) {
  uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (iteration + 1));
  return splitmix64_next(state);
}

}  // namespace

BootstrapResult paired_bootstrap(const std::vector<double>& scores_a,
                                 const std::vector<double>& scores_b, long iterations,
                                 uint64_t seed, int jobs) {
  if (scores_a.size() != scores_b.size()) {
    throw Error(Error::Kind::length_mismatch,
                "paired score vectors differ in length: " + std::to_string(scores_a.size()) +
                    " vs " + std::to_string(scores_b.size()));
  }
  if (scores_a.size() < 2) {
    throw Error(Error::Kind::empty_input, "paired bootstrap needs at least two documents");
  }
  if (iterations < 1) {
    throw Error(Error::Kind::invalid_config, "iterations must be >= 1");
  }

  const size_t n = scores_a.size();
  std::vector<double> diff(n);
  double sum_diff = 0.0;
  for (size_t i = 0; i < n; ++i) {
    diff[i] = scores_a[i] - scores_b[i];
    sum_diff += diff[i];
  }
  const double observed = sum_diff / static_cast<double>(n);
  const double threshold = 2.0 * observed;

  // Chunked so the per-iteration seeds make the count independent of jobs.
  const long chunk = 1024;
  const long num_chunks = (iterations + chunk - 1) / chunk;
  std::vector<long> chunk_hits(num_chunks, 0);
  detail::parallel_for_index(static_cast<size_t>(num_chunks), jobs, [&](size_t ci) {
    long begin = static_cast<long>(ci) * chunk;
    long end = std::min(iterations, begin + chunk);
    long hits = 0;
    for (long it = begin; it < end; ++it) {
      uint64_t state = mix_seed(seed, static_cast<uint64_t>(it));
      double total = 0.0;
      for (size_t k = 0; k < n; ++k) {
        total += diff[splitmix64_next(state) % n];
      }
      if (total / static_cast<double>(n) >= threshold) ++hits;
    }
    chunk_hits[ci] = hits;
  });

  long hits = 0;
  for (long h : chunk_hits) hits += h;

  BootstrapResult result;
  result.observed_delta = observed;
  result.p_value = static_cast<double>(hits) / static_cast<double>(iterations);
  result.iterations = iterations;
  result.seed = seed;
  return result;
}

KappaResult fleiss_kappa(const RatingsTable& table) {
  const size_t items = table.counts.size();
  const size_t cats = table.categories.size();
  if (items == 0 || cats == 0) {
    throw Error(Error::Kind::empty_input, "ratings table is empty");
  }
  const long n = table.raters;
  if (n < 2) {
    throw Error(Error::Kind::ragged_ratings, "need at least two raters per item");
  }
  for (const auto& row : table.counts) {
    long sum = 0;
    for (long c : row) sum += c;
    if (sum != n) {
      throw Error(Error::Kind::ragged_ratings, "row sum differs from the common rater count");
    }
  }

  double p_bar = 0.0;
  std::vector<double> p_j(cats, 0.0);
  for (size_t i = 0; i < items; ++i) {
    double agree = 0.0;
    for (size_t j = 0; j < cats; ++j) {
      long c = table.counts[i][j];
      agree += static_cast<double>(c) * (c - 1);
      p_j[j] += static_cast<double>(c);
    }
    p_bar += agree / (static_cast<double>(n) * (n - 1));
  }
  p_bar /= static_cast<double>(items);

  double p_e = 0.0;
  for (size_t j = 0; j < cats; ++j) {
    double share = p_j[j] / (static_cast<double>(items) * n);
    p_e += share * share;
  }

  KappaResult result;
  if (1.0 - p_e <= 1e-12) {
    result.kappa = 1.0;
    result.degenerate_agreement = true;
    return result;
  }
  result.kappa = (p_bar - p_e) / (1.0 - p_e);
  return result;
}

RatingsTable build_ratings_table(const std::vector<RatingRecord>& records, const BinSpec& bins) {
  if (records.empty()) {
    throw Error(Error::Kind::empty_input, "no rating records");
  }

  // Items keep first-appearance order.
  std::vector<std::string> items;
  std::unordered_map<std::string, size_t> item_index;
  std::vector<std::vector<std::string>> values_per_item;
  for (const auto& rec : records) {
    auto [it, inserted] = item_index.try_emplace(rec.item, items.size());
    if (inserted) {
      items.push_back(rec.item);
      values_per_item.emplace_back();
    }
    values_per_item[it->second].push_back(rec.value);
  }
  const long raters = static_cast<long>(values_per_item.front().size());
  for (size_t i = 0; i < items.size(); ++i) {
    if (static_cast<long>(values_per_item[i].size()) != raters) {
      throw Error(Error::Kind::ragged_ratings,
                  "item \"" + items[i] + "\" has " + std::to_string(values_per_item[i].size()) +
                      " ratings, expected " + std::to_string(raters));
    }
  }

  RatingsTable table;
  table.items = items;
  table.raters = raters;

  if (bins.mode == BinSpec::Mode::none) {
    std::map<std::string, size_t> cat_index;  // sorted label order
    for (const auto& vals : values_per_item)
      for (const auto& v : vals) cat_index.emplace(v, 0);
    size_t next = 0;
    for (auto& [label, idx] : cat_index) {
      idx = next++;
      table.categories.push_back(label);
    }
    table.counts.assign(items.size(), std::vector<long>(table.categories.size(), 0));
    for (size_t i = 0; i < items.size(); ++i)
      for (const auto& v : values_per_item[i]) table.counts[i][cat_index[v]] += 1;
    return table;
  }

  auto parse_value = [](const std::string& raw) {
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0') {
      throw Error(Error::Kind::parse_error, "non-numeric rating value \"" + raw + "\"");
    }
    return v;
  };

  std::vector<double> edges = bins.edges;
  if (bins.mode == BinSpec::Mode::quartiles) {
    std::vector<double> all;
    for (const auto& vals : values_per_item)
      for (const auto& v : vals) all.push_back(parse_value(v));
    std::sort(all.begin(), all.end());
    auto quantile = [&](double q) {
      double pos = q * static_cast<double>(all.size() - 1);
      size_t lo = static_cast<size_t>(pos);
      size_t hi = std::min(lo + 1, all.size() - 1);
      return all[lo] + (pos - lo) * (all[hi] - all[lo]);
    };
    edges = {quantile(0.25), quantile(0.5), quantile(0.75)};
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  if (edges.empty() || !std::is_sorted(edges.begin(), edges.end())) {
    throw Error(Error::Kind::invalid_config, "bin edges must be non-empty and increasing");
  }

  for (size_t b = 0; b <= edges.size(); ++b) table.categories.push_back("bin" + std::to_string(b + 1));
  table.counts.assign(items.size(), std::vector<long>(table.categories.size(), 0));
  for (size_t i = 0; i < items.size(); ++i) {
    for (const auto& raw : values_per_item[i]) {
      double v = parse_value(raw);
      size_t b = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
      table.counts[i][b] += 1;
    }
  }
  return table;
}

SweepResult theta_sweep(const std::vector<AnnotatedDocument>& corpus,
                        const std::vector<SystemPredictions>& systems,
                        const std::vector<Theta>& grid, const SimilarityScorer& scorer,
                        int jobs) {
  if (systems.empty()) {
    throw Error(Error::Kind::empty_input, "theta sweep needs at least one system");
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].value() <= 0.0 || (i > 0 && grid[i].value() <= grid[i - 1].value())) {
      throw Error(Error::Kind::invalid_config, "grid must be strictly increasing within (0, 1]");
    }
  }

  struct DocView {
    std::string doc_id;
    std::vector<NormalizedPhrase> gold;
    std::vector<NormalizedPhrase> detected;
  };
  std::vector<std::pair<std::string, DocView>> units;  // (system, doc)
  long exact_total = 0;
  for (const auto& system : systems) {
    std::unordered_map<std::string, const PredictionRecord*> by_id;
    for (const auto& pred : system.predictions) {
      if (std::none_of(corpus.begin(), corpus.end(),
                       [&](const AnnotatedDocument& d) { return d.id == pred.doc_id; })) {
        throw Error(Error::Kind::unknown_doc_id, "system \"" + system.system_id +
                                                     "\" predicts unknown document \"" +
                                                     pred.doc_id + "\"");
      }
      by_id[pred.doc_id] = &pred;
    }
    for (const auto& doc : corpus) {
      DocView view;
      view.doc_id = doc.id;
      for (const auto& pair : doc.gold) view.gold.push_back(pair.normalized);
      auto it = by_id.find(doc.id);
      if (it != by_id.end()) {
        for (const auto& pair : it->second->detected) view.detected.push_back(pair.normalized);
      }
      std::set<std::string> gold_set;
      for (const auto& g : view.gold) gold_set.insert(g.text);
      for (const auto& d : view.detected) exact_total += gold_set.count(d.text) ? 1 : 0;
      units.emplace_back(system.system_id, std::move(view));
    }
  }

  SweepResult result;
  result.rows.resize(grid.size());
  std::vector<std::vector<SweepPairRecord>> per_theta_pairs(grid.size());
  detail::parallel_for_index(grid.size(), jobs, [&](size_t ti) {
    const Theta& theta = grid[ti];
    SweepRow row;
    row.theta = theta.value();
    row.exact_total = exact_total;
    std::set<std::pair<std::string, std::string>> distinct;  // (detected, gold)
    for (const auto& [system_id, view] : units) {
      MatchSet match = intersect(view.gold, view.detected, theta, scorer, view.doc_id);
      row.matched_total += static_cast<long>(match.pairs.size());
      auto nonexact = non_exact_pairs(match, view.gold, view.detected);
      for (const auto& [detected_text, gold_text] : nonexact) {
        distinct.emplace(detected_text, gold_text);
        double sigma = 0.0;
        for (const auto& pair : match.pairs) {
          if (view.detected[pair.detected_index].text == detected_text &&
              view.gold[pair.gold_index].text == gold_text) {
            sigma = pair.similarity;
            break;
          }
        }
        per_theta_pairs[ti].push_back(
            SweepPairRecord{theta.value(), system_id, view.doc_id, detected_text, gold_text, sigma});
      }
    }
    row.nonexact_union = static_cast<long>(distinct.size());
    result.rows[ti] = row;
  });

  for (auto& block : per_theta_pairs) {
    std::sort(block.begin(), block.end(), [](const SweepPairRecord& a, const SweepPairRecord& b) {
      if (a.system != b.system) return a.system < b.system;
      if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return std::tie(a.detected, a.gold) < std::tie(b.detected, b.gold);
    });
    result.pairs.insert(result.pairs.end(), block.begin(), block.end());
  }
  return result;
}

}  // namespace aspecteval
