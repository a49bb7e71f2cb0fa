#include "aspecteval/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

namespace aspecteval {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string locus(const std::filesystem::path& path, long line) {
  return path.string() + ":" + std::to_string(line);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Kind::parse_error, "cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Polarity require_polarity(const std::string& label, const std::string& where) {
  auto polarity = parse_polarity(label);
  if (!polarity) {
    throw Error(Error::Kind::parse_error, where + ": unknown polarity \"" + label + "\"");
  }
  return *polarity;
}

AspectPolarityPair require_pair(const std::string& aspect, const std::string& polarity,
                                const std::string& where) {
  try {
    return make_pair(aspect, require_polarity(polarity, where));
  } catch (const Error& e) {
    if (e.kind() == Error::Kind::empty_phrase) {
      throw Error(Error::Kind::parse_error, where + ": empty aspect phrase");
    }
    throw;
  }
}

void check_unique_id(std::unordered_set<std::string>& seen, const std::string& id,
                     const std::string& where) {
  if (!seen.insert(id).second) {
    throw Error(Error::Kind::duplicate_doc_id, where + ": duplicate document id \"" + id + "\"");
  }
}

std::vector<AnnotatedDocument> load_canonical(const std::filesystem::path& path) {
  std::vector<AnnotatedDocument> corpus;
  std::unordered_set<std::string> ids;
  long lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("id") ||
        !record.contains("text") || !record.contains("aspects")) {
      throw Error(Error::Kind::parse_error,
                  locus(path, lineno) + ": expected {\"id\", \"text\", \"aspects\"}");
    }
    AnnotatedDocument doc;
    doc.id = record["id"].get<std::string>();
    doc.text = record["text"].get<std::string>();
    check_unique_id(ids, doc.id, locus(path, lineno));
    std::vector<AspectPolarityPair> pairs;
    for (const auto& entry : record["aspects"]) {
      if (!entry.is_object() || !entry.contains("aspect") || !entry.contains("polarity")) {
        throw Error(Error::Kind::parse_error,
                    locus(path, lineno) + ": aspect entries need {\"aspect\", \"polarity\"}");
      }
      pairs.push_back(require_pair(entry["aspect"].get<std::string>(),
                                   entry["polarity"].get<std::string>(), locus(path, lineno)));
    }
    doc.gold = dedup_aspects(pairs, locus(path, lineno));
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

std::vector<AnnotatedDocument> load_semeval_xml(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_xml(path.string(), tree);
  } catch (const std::exception& e) {
    throw Error(Error::Kind::parse_error, path.string() + ": " + e.what());
  }

  auto sentences = tree.get_child_optional("sentences");
  if (!sentences) {
    throw Error(Error::Kind::parse_error, path.string() + ": missing <sentences> root");
  }
  std::vector<AnnotatedDocument> corpus;
  std::unordered_set<std::string> ids;
  long index = 0;
  for (const auto& [name, sentence] : *sentences) {
    if (name != "sentence") continue;
    ++index;
    std::string where = path.string() + ": sentence #" + std::to_string(index);
    AnnotatedDocument doc;
    doc.id = sentence.get<std::string>("<xmlattr>.id", std::to_string(index));
    doc.text = sentence.get<std::string>("text", "");
    check_unique_id(ids, doc.id, where);
    std::vector<AspectPolarityPair> pairs;
    if (auto terms = sentence.get_child_optional("aspectTerms")) {
      for (const auto& [tname, term] : *terms) {
        if (tname != "aspectTerm") continue;
        auto aspect = term.get_optional<std::string>("<xmlattr>.term");
        auto polarity = term.get_optional<std::string>("<xmlattr>.polarity");
        if (!aspect || !polarity) {
          throw Error(Error::Kind::parse_error,
                      where + ": aspectTerm needs term and polarity attributes");
        }
        pairs.push_back(require_pair(*aspect, *polarity, where));
      }
    }
    doc.gold = dedup_aspects(pairs, where);
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

// Three lines per example: text with a $T$ placeholder, the target phrase,
// and a label in {-1, 0, 1}.
std::vector<AnnotatedDocument> load_twitter_triple(const std::filesystem::path& path) {
  std::vector<std::string> lines = read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() % 3 != 0) {
    throw Error(Error::Kind::parse_error,
                path.string() + ": expected records of 3 lines, got " +
                    std::to_string(lines.size()) + " lines");
  }
  std::vector<AnnotatedDocument> corpus;
  std::unordered_set<std::string> ids;
  for (size_t i = 0; i < lines.size(); i += 3) {
    long record = static_cast<long>(i / 3) + 1;
    std::string where = path.string() + ": record #" + std::to_string(record);
    const std::string& raw_text = lines[i];
    const std::string& target = lines[i + 1];
    std::string label = lines[i + 2];
    label.erase(std::remove_if(label.begin(), label.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                label.end());

    Polarity polarity;
    if (label == "-1") polarity = Polarity::negative;
    else if (label == "0") polarity = Polarity::neutral;
    else if (label == "1") polarity = Polarity::positive;
    else throw Error(Error::Kind::parse_error, where + ": unknown label \"" + label + "\"");

    std::string text = raw_text;
    const std::string placeholder = "$T$";
    size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
      text.replace(pos, placeholder.size(), target);
      pos += target.size();
    }

    AnnotatedDocument doc;
    doc.id = "twitter-" + std::to_string(record);
    doc.text = text;
    check_unique_id(ids, doc.id, where);
    try {
      doc.gold.push_back(make_pair(target, polarity));
    } catch (const Error& e) {
      if (e.kind() == Error::Kind::empty_phrase) {
        throw Error(Error::Kind::parse_error, where + ": empty target phrase");
      }
      throw;
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

// JSON array of {"id", "text", "annotations": {aspect: polarity, ...}}.
std::vector<AnnotatedDocument> load_sport_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Kind::parse_error, "cannot open " + path.string());
  }
  ordered_json root = ordered_json::parse(in, nullptr, false);
  if (root.is_discarded() || !root.is_array()) {
    throw Error(Error::Kind::parse_error, path.string() + ": expected a JSON array of documents");
  }
  std::vector<AnnotatedDocument> corpus;
  std::unordered_set<std::string> ids;
  long index = 0;
  for (const auto& record : root) {
    ++index;
    std::string where = path.string() + ": document #" + std::to_string(index);
    if (!record.is_object() || !record.contains("id") || !record.contains("text") ||
        !record.contains("annotations") || !record["annotations"].is_object()) {
      throw Error(Error::Kind::parse_error,
                  where + ": expected {\"id\", \"text\", \"annotations\"}");
    }
    AnnotatedDocument doc;
    doc.id = record["id"].is_string() ? record["id"].get<std::string>()
                                      : record["id"].dump();
    doc.text = record["text"].get<std::string>();
    check_unique_id(ids, doc.id, where);
    std::vector<AspectPolarityPair> pairs;
    for (const auto& [aspect, polarity] : record["annotations"].items()) {
      if (!polarity.is_string()) {
        throw Error(Error::Kind::parse_error, where + ": polarity must be a string");
      }
      pairs.push_back(require_pair(aspect, polarity.get<std::string>(), where));
    }
    doc.gold = dedup_aspects(pairs, where);
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

ordered_json aspects_to_json(const std::vector<AspectPolarityPair>& pairs) {
  ordered_json aspects = ordered_json::array();
  for (const auto& pair : pairs) {
    ordered_json entry;
    entry["aspect"] = pair.aspect;
    entry["polarity"] = to_string(pair.polarity);
    aspects.push_back(std::move(entry));
  }
  return aspects;
}

}  // namespace

std::optional<CorpusFormat> parse_format(const std::string& name) {
  if (name == "canonical") return CorpusFormat::canonical;
  if (name == "semeval-xml") return CorpusFormat::semeval_xml;
  if (name == "twitter-triple") return CorpusFormat::twitter_triple;
  if (name == "sport-json") return CorpusFormat::sport_json;
  return std::nullopt;
}

const char* to_string(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::canonical: return "canonical";
    case CorpusFormat::semeval_xml: return "semeval-xml";
    case CorpusFormat::twitter_triple: return "twitter-triple";
    case CorpusFormat::sport_json: return "sport-json";
  }
  return "canonical";
}

CorpusSummary summarize(const std::vector<AnnotatedDocument>& corpus) {
  CorpusSummary summary;
  std::unordered_set<std::string> unique;
  summary.documents = static_cast<long>(corpus.size());
  for (const auto& doc : corpus) {
    const std::string text = normalize_text(doc.text);
    for (const auto& pair : doc.gold) {
      ++summary.aspects;
      unique.insert(pair.normalized.text);
      switch (pair.polarity) {
        case Polarity::positive: ++summary.positive; break;
        case Polarity::negative: ++summary.negative; break;
        case Polarity::neutral: ++summary.neutral; break;
        case Polarity::conflicting: ++summary.conflicting; break;
      }
      if (text.find(pair.normalized.text) == std::string::npos) ++summary.implicit_aspects;
    }
  }
  summary.unique_aspects = static_cast<long>(unique.size());
  return summary;
}

std::vector<AnnotatedDocument> load_corpus(const std::filesystem::path& path,
                                           CorpusFormat format) {
  switch (format) {
    case CorpusFormat::canonical: return load_canonical(path);
    case CorpusFormat::semeval_xml: return load_semeval_xml(path);
    case CorpusFormat::twitter_triple: return load_twitter_triple(path);
    case CorpusFormat::sport_json: return load_sport_json(path);
  }
  throw Error(Error::Kind::invalid_config, "unknown corpus format");
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::vector<PredictionRecord> predictions;
  std::unordered_set<std::string> ids;
  long lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("id") ||
        !record.contains("aspects")) {
      throw Error(Error::Kind::parse_error,
                  locus(path, lineno) + ": expected {\"id\", \"aspects\"}");
    }
    PredictionRecord pred;
    pred.doc_id = record["id"].get<std::string>();
    check_unique_id(ids, pred.doc_id, locus(path, lineno));
    std::vector<AspectPolarityPair> pairs;
    for (const auto& entry : record["aspects"]) {
      if (!entry.is_object() || !entry.contains("aspect") || !entry.contains("polarity")) {
        throw Error(Error::Kind::parse_error,
                    locus(path, lineno) + ": aspect entries need {\"aspect\", \"polarity\"}");
      }
      pairs.push_back(require_pair(entry["aspect"].get<std::string>(),
                                   entry["polarity"].get<std::string>(), locus(path, lineno)));
    }
    pred.detected = dedup_aspects(pairs, locus(path, lineno));
    predictions.push_back(std::move(pred));
  }
  return predictions;
}

void write_canonical(const std::vector<AnnotatedDocument>& corpus,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Error::Kind::parse_error, "cannot write " + path.string());
  }
  for (const auto& doc : corpus) {
    ordered_json record;
    record["id"] = doc.id;
    record["text"] = doc.text;
    record["aspects"] = aspects_to_json(doc.gold);
    out << record.dump() << '\n';
  }
}

void write_predictions(const std::vector<PredictionRecord>& predictions,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Error::Kind::parse_error, "cannot write " + path.string());
  }
  for (const auto& pred : predictions) {
    ordered_json record;
    record["id"] = pred.doc_id;
    record["aspects"] = aspects_to_json(pred.detected);
    out << record.dump() << '\n';
  }
}

std::vector<AnnotatedDocument> convert(const std::filesystem::path& source, CorpusFormat format,
                                       const std::filesystem::path& dest) {
  std::vector<AnnotatedDocument> corpus = load_corpus(source, format);
  write_canonical(corpus, dest);
  return corpus;
}

namespace {

// Scans for the first balanced top-level {...} block, honoring quotes.
std::optional<std::string> balanced_block(const std::string& text) {
  size_t start = text.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  char quote = 0;
  for (size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (quote != 0) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '{') ++depth;
    else if (c == '}') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

struct TokenReader {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  std::string quoted() {
    char quote = text[pos++];
    std::string out;
    while (pos < text.size() && text[pos] != quote) {
      char c = text[pos++];
      if (c == '\\' && pos < text.size()) {
        char esc = text[pos++];
        switch (esc) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: out.push_back(esc); break;
        }
      } else {
        out.push_back(c);
      }
    }
    if (pos < text.size()) ++pos;  // closing quote
    return out;
  }

  // Bare token up to any of the stop characters. NUL bytes are content, not
  // stops, so arbitrary binary noise still makes forward progress.
  std::string bare(const char* stops) {
    auto is_stop = [stops](char c) {
      for (const char* s = stops; *s; ++s)
        if (*s == c) return true;
      return false;
    };
    std::string out;
    while (pos < text.size() && !is_stop(text[pos])) out.push_back(text[pos++]);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    return out;
  }

  // Skips a nested {...} or [...] value.
  void skip_nested() {
    char open = text[pos];
    char close = open == '{' ? '}' : ']';
    int depth = 0;
    char quote = 0;
    while (pos < text.size()) {
      char c = text[pos++];
      if (quote != 0) {
        if (c == '\\') ++pos;
        else if (c == quote) quote = 0;
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      else if (c == open) ++depth;
      else if (c == close && --depth == 0) return;
    }
  }
};

}  // namespace

LlmParseResult parse_llm_annotation(const std::string& text) {
  LlmParseResult result;
  auto block = balanced_block(text);
  if (!block) {
    if (text.find('{') != std::string::npos) {
      result.diagnostics.push_back("unbalanced annotation block");
    } else if (!text.empty()) {
      result.diagnostics.push_back("no annotation block found");
    }
    return result;
  }

  // Walk the interior of the block as tolerant key:value pairs.
  TokenReader reader{*block, 1};  // skip the opening brace
  std::unordered_map<std::string, size_t> seen;
  while (true) {
    size_t round_start = reader.pos;
    reader.skip_ws();
    if (reader.done()) break;
    char c = reader.peek();
    if (c == '}') break;
    if (c == ',') {
      ++reader.pos;
      continue;
    }
    // Termination guard: every round below must consume input; if one ever
    // does not (degenerate byte noise), step over the offending byte.
    struct Progress {
      TokenReader& r;
      size_t start;
      ~Progress() {
        if (r.pos == start) ++r.pos;
      }
    } progress{reader, round_start};

    std::string key;
    if (c == '"' || c == '\'') key = reader.quoted();
    else key = reader.bare(":,}");

    reader.skip_ws();
    if (reader.done() || reader.peek() != ':') {
      if (!key.empty()) result.diagnostics.push_back("dangling key ignored: \"" + key + "\"");
      // Resynchronize at the next separator.
      reader.bare(",}");
      continue;
    }
    ++reader.pos;  // ':'
    reader.skip_ws();

    std::string value;
    if (reader.done()) {
      result.diagnostics.push_back("missing value for key \"" + key + "\"");
      break;
    } else if (reader.peek() == '"' || reader.peek() == '\'') {
      value = reader.quoted();
    } else if (reader.peek() == '{' || reader.peek() == '[') {
      reader.skip_nested();
      result.diagnostics.push_back("nested value ignored for key \"" + key + "\"");
      continue;
    } else {
      value = reader.bare(",}");
    }

    auto polarity = parse_polarity(value);
    if (!polarity) {
      result.diagnostics.push_back("unknown polarity \"" + value + "\" for key \"" + key + "\"");
      continue;
    }
    NormalizedPhrase normalized;
    try {
      normalized = normalize_phrase(key);
    } catch (const Error&) {
      result.diagnostics.push_back("empty aspect phrase skipped");
      continue;
    }

    auto it = seen.find(normalized.text);
    if (it != seen.end()) {
      if (result.pairs[it->second].polarity != *polarity) {
        result.diagnostics.push_back("conflicting duplicate for \"" + normalized.text +
                                     "\"; keeping the first polarity");
      }
      continue;
    }
    seen.emplace(normalized.text, result.pairs.size());
    result.pairs.push_back(AspectPolarityPair{key, normalized, *polarity});
  }
  return result;
}

}  // namespace aspecteval
