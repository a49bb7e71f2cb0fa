#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aspecteval/error.hpp"

namespace aspecteval {

// Sentiment label attached to an aspect. `conflicting` can enter through
// ingestion (some corpora annotate it); the scorer folds it into neutral
// unless configured otherwise.
enum class Polarity { positive, negative, neutral, conflicting };

// Case-insensitive parse; accepts "conflict" and "conflicting".
std::optional<Polarity> parse_polarity(const std::string& label);

// Lowercase serialized form.
const char* to_string(Polarity p);

// A phrase in canonical comparison form: Unicode NFC, lowercased with the
// root locale, trimmed, internal whitespace runs collapsed to one space.
struct NormalizedPhrase {
  std::string text;

  bool operator==(const NormalizedPhrase& other) const { return text == other.text; }
  bool operator!=(const NormalizedPhrase& other) const { return text != other.text; }
  bool operator<(const NormalizedPhrase& other) const { return text < other.text; }
};

// Applies the normalization rules to arbitrary text; an empty result is fine
// here (document bodies may normalize to nothing).
std::string normalize_text(const std::string& raw);

// Throws Error{empty_phrase} when the normalized form is empty.
// Idempotent: normalize_phrase(normalize_phrase(x).text) == normalize_phrase(x).
NormalizedPhrase normalize_phrase(const std::string& raw);

// One annotated opinion target. `aspect` keeps the surface form for display;
// all comparisons go through `normalized`.
struct AspectPolarityPair {
  std::string aspect;
  NormalizedPhrase normalized;
  Polarity polarity = Polarity::neutral;
};

// Builds a pair, normalizing the aspect phrase.
AspectPolarityPair make_pair(const std::string& aspect, Polarity polarity);

struct AnnotatedDocument {
  std::string id;
  std::string text;
  std::vector<AspectPolarityPair> gold;  // deduplicated under normalization
};

struct PredictionRecord {
  std::string doc_id;
  std::vector<AspectPolarityPair> detected;  // deduplicated under normalization
};

// Merges duplicates (same normalized phrase, same polarity) keeping the first
// surface form. A duplicate with a different polarity throws
// Error{conflicting_duplicate_aspect}; `context` names the offending record
// in the message.
std::vector<AspectPolarityPair> dedup_aspects(const std::vector<AspectPolarityPair>& pairs,
                                              const std::string& context);

}  // namespace aspecteval

template <>
struct std::hash<aspecteval::NormalizedPhrase> {
  size_t operator()(const aspecteval::NormalizedPhrase& p) const noexcept {
    return std::hash<std::string>{}(p.text);
  }
};
