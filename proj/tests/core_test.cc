#include "aspecteval/core.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace aspecteval;

TEST(NormalizePhrase, CollapsesWhitespaceAndCase) {
  EXPECT_EQ(normalize_phrase("  Air  Conditioner ").text, "air conditioner");
  EXPECT_EQ(normalize_phrase("service").text, "service");
  EXPECT_EQ(normalize_phrase("Allocation of Volunteers").text, "allocation of volunteers");
}

TEST(NormalizePhrase, HandlesUnicode) {
  // Combining acute composes with the base letter.
  EXPECT_EQ(normalize_phrase("Cafe\xCC\x81 Latte").text, "caf\xC3\xA9 latte");
  // Tabs, newlines, and non-breaking spaces all collapse.
  EXPECT_EQ(normalize_phrase("a\t b\xC2\xA0 c\n").text, "a b c");
}

TEST(NormalizePhrase, EmptyPhraseThrows) {
  EXPECT_THROW(normalize_phrase(""), Error);
  EXPECT_THROW(normalize_phrase("   \t \n"), Error);
  try {
    normalize_phrase(" ");
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::empty_phrase);
  }
}

TEST(NormalizePhrase, Idempotent) {
  std::mt19937 gen(7);
  const std::vector<std::string> pieces = {"a", "B",  "Cafe\xCC\x81", " ",    "\t",
                                           "X Y", "\xC3\x89", "z ",         "MiXeD", "\xC2\xA0"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string raw;
    int parts = 1 + static_cast<int>(gen() % 6);
    for (int i = 0; i < parts; ++i) raw += pieces[gen() % pieces.size()];
    try {
      NormalizedPhrase once = normalize_phrase(raw);
      NormalizedPhrase twice = normalize_phrase(once.text);
      EXPECT_EQ(once.text, twice.text) << "raw: " << raw;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), Error::Kind::empty_phrase);
    }
  }
}

TEST(Polarity, ParseIsCaseInsensitive) {
  EXPECT_EQ(parse_polarity("Positive"), Polarity::positive);
  EXPECT_EQ(parse_polarity("NEGATIVE"), Polarity::negative);
  EXPECT_EQ(parse_polarity("neutral"), Polarity::neutral);
  EXPECT_EQ(parse_polarity("conflict"), Polarity::conflicting);
  EXPECT_EQ(parse_polarity("Conflicting"), Polarity::conflicting);
  EXPECT_FALSE(parse_polarity("meh").has_value());
}

TEST(Polarity, SerializedFormIsLowercase) {
  EXPECT_STREQ(to_string(Polarity::positive), "positive");
  EXPECT_STREQ(to_string(Polarity::conflicting), "conflicting");
}

TEST(DedupAspects, MergesEqualNormalizedForms) {
  std::vector<AspectPolarityPair> pairs = {
      make_pair("Service", Polarity::positive),
      make_pair("  service ", Polarity::positive),
      make_pair("food", Polarity::negative),
  };
  auto out = dedup_aspects(pairs, "doc");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].aspect, "Service");  // first surface form wins
  EXPECT_EQ(out[0].normalized.text, "service");
  EXPECT_EQ(out[1].normalized.text, "food");
}

TEST(DedupAspects, ConflictingPolaritiesAreAnError) {
  std::vector<AspectPolarityPair> pairs = {
      make_pair("service", Polarity::positive),
      make_pair("SERVICE", Polarity::negative),
  };
  try {
    dedup_aspects(pairs, "doc-3");
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), Error::Kind::conflicting_duplicate_aspect);
    EXPECT_NE(std::string(e.what()).find("doc-3"), std::string::npos);
  }
}

TEST(DedupAspects, PreservesDistinctNormalizedSet) {
  std::mt19937 gen(11);
  const std::vector<std::string> words = {"food", "Food", "  food", "service", "drinks",
                                          "drinks ", "AC", "ac"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<AspectPolarityPair> pairs;
    std::set<std::string> expected;
    int count = 1 + static_cast<int>(gen() % 6);
    for (int i = 0; i < count; ++i) {
      const std::string& w = words[gen() % words.size()];
      pairs.push_back(make_pair(w, Polarity::neutral));
      expected.insert(normalize_phrase(w).text);
    }
    auto out = dedup_aspects(pairs, "doc");
    std::set<std::string> got;
    for (const auto& pair : out) got.insert(pair.normalized.text);
    EXPECT_EQ(got, expected);
  }
}
