#include "aspecteval/core.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace aspecteval {

std::optional<Polarity> parse_polarity(const std::string& label) {
  std::string lower;
  lower.reserve(label.size());
  for (char c : label) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "positive") return Polarity::positive;
  if (lower == "negative") return Polarity::negative;
  if (lower == "neutral") return Polarity::neutral;
  if (lower == "conflicting" || lower == "conflict") return Polarity::conflicting;
  return std::nullopt;
}

const char* to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::conflicting: return "conflicting";
  }
  return "neutral";
}

std::string normalize_text(const std::string& raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);

  // Invalid UTF-8 sequences become U+FFFD rather than failing; upstream
  // parsers rely on normalization never throwing on byte noise.
  icu::UnicodeString us = icu::UnicodeString::fromUTF8(raw);
  us = nfc->normalize(us, status);
  us.toLower(icu::Locale::getRoot());
  // Lowercasing can denormalize composed sequences in rare scripts.
  us = nfc->normalize(us, status);

  icu::UnicodeString collapsed;
  bool pending_space = false;
  bool seen_content = false;
  for (int32_t i = 0; i < us.length();) {
    UChar32 c = us.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = seen_content;
      continue;
    }
    if (pending_space) {
      collapsed.append(static_cast<UChar32>(U' '));
      pending_space = false;
    }
    collapsed.append(c);
    seen_content = true;
  }

  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

NormalizedPhrase normalize_phrase(const std::string& raw) {
  std::string out = normalize_text(raw);
  if (out.empty()) {
    throw Error(Error::Kind::empty_phrase, "phrase is empty after normalization: \"" + raw + "\"");
  }
  return NormalizedPhrase{std::move(out)};
}

AspectPolarityPair make_pair(const std::string& aspect, Polarity polarity) {
  return AspectPolarityPair{aspect, normalize_phrase(aspect), polarity};
}

std::vector<AspectPolarityPair> dedup_aspects(const std::vector<AspectPolarityPair>& pairs,
                                              const std::string& context) {
  std::vector<AspectPolarityPair> out;
  std::unordered_map<NormalizedPhrase, size_t> seen;
  for (const auto& pair : pairs) {
    auto it = seen.find(pair.normalized);
    if (it == seen.end()) {
      seen.emplace(pair.normalized, out.size());
      out.push_back(pair);
      continue;
    }
    if (out[it->second].polarity != pair.polarity) {
      throw Error(Error::Kind::conflicting_duplicate_aspect,
                  context + ": aspect \"" + pair.normalized.text +
                      "\" annotated with both " + to_string(out[it->second].polarity) +
                      " and " + to_string(pair.polarity));
    }
    // Same phrase, same polarity: keep the first surface form.
  }
  return out;
}

}  // namespace aspecteval
