#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aspecteval/core.hpp"

namespace aspecteval {

enum class CorpusFormat { canonical, semeval_xml, twitter_triple, sport_json };

std::optional<CorpusFormat> parse_format(const std::string& name);
const char* to_string(CorpusFormat format);

// Per-file counts emitted after loading so converted datasets can be checked
// against their published statistics.
struct CorpusSummary {
  long documents = 0;
  long aspects = 0;
  long unique_aspects = 0;  // distinct normalized phrases across the corpus
  long positive = 0;
  long negative = 0;
  long neutral = 0;
  long conflicting = 0;
  // Gold aspects whose normalized phrase is not a substring of the normalized
  // document text.
  long implicit_aspects = 0;
  double implicit_rate() const {
    return aspects > 0 ? static_cast<double>(implicit_aspects) / aspects : 0.0;
  }
};

CorpusSummary summarize(const std::vector<AnnotatedDocument>& corpus);

// Loads a corpus in the named format. Gold sets come back deduplicated;
// errors carry the file and record locus.
std::vector<AnnotatedDocument> load_corpus(const std::filesystem::path& path,
                                           CorpusFormat format);

// JSON Lines, one {"id", "aspects": [{"aspect", "polarity"}...]} per document.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

// Canonical JSON Lines writers: {"id", "text", "aspects": [...]} per line,
// fixed key order, UTF-8, LF endings.
void write_canonical(const std::vector<AnnotatedDocument>& corpus,
                     const std::filesystem::path& path);
void write_predictions(const std::vector<PredictionRecord>& predictions,
                       const std::filesystem::path& path);

// Converts a source file into the canonical corpus format and returns the
// loaded documents. Lossless for (id, text, aspect, polarity) up to gold-set
// deduplication; converting a canonical file again is byte-stable.
std::vector<AnnotatedDocument> convert(const std::filesystem::path& source, CorpusFormat format,
                                       const std::filesystem::path& dest);

struct LlmParseResult {
  std::vector<AspectPolarityPair> pairs;
  std::vector<std::string> diagnostics;  // what was skipped or left unparsed
};

// Extracts aspect-polarity pairs from raw model output: takes the first
// balanced {...} block and reads key/value pairs, tolerating single quotes,
// trailing commas, numbered prefixes, markdown fences, and unquoted tokens.
// Never throws; anything unparseable is reported through diagnostics.
LlmParseResult parse_llm_annotation(const std::string& text);

}  // namespace aspecteval
