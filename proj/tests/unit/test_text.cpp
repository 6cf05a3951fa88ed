#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ck/canonical_json.hpp"
#include "ck/error.hpp"
#include "ck/text.hpp"

using namespace ck;

TEST(Text, Utf8RoundTrip) {
  const std::string s = "原来是根瘤菌 nitrogen ＡＢＣ";
  EXPECT_EQ(text::encode_utf8(text::decode_utf8(s)), s);
  EXPECT_EQ(text::codepoint_length("根瘤菌"), 3u);
}

TEST(Text, InvalidBytesBecomeReplacement) {
  const auto d = text::decode_utf8(std::string("a\xff" "b"));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[1], U'�');
}

TEST(Text, NormalizeFoldsWidthCaseAndSpace) {
  EXPECT_EQ(text::normalize("  ＡＢＣ\t  Def  "), "abc def");
}

TEST(Text, TruncateAddsEllipsisAtLimit) {
  const std::string longer(300, 'x');
  const auto t = text::truncate(longer, 120);
  EXPECT_EQ(text::codepoint_length(t), 120u);
  EXPECT_EQ(t.substr(t.size() - 3), "…");
  EXPECT_EQ(text::truncate("short", 120), "short");
}

TEST(Text, TokenizeLatinAndCjk) {
  const auto toks = text::tokenize("Euler's series 根瘤菌");
  std::vector<std::string> words;
  for (const auto& t : toks) words.push_back(t.text);
  EXPECT_EQ(words, (std::vector<std::string>{"euler", "series", "根瘤", "瘤菌"}));
  EXPECT_TRUE(toks.back().cjk);
  const auto single = text::tokenize("菌");
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].text, "菌");
}

TEST(Text, ContainsNormalized) {
  EXPECT_TRUE(text::contains_normalized("The  DNA helix", "dna"));
  EXPECT_FALSE(text::contains_normalized("protein", "dna"));
}

TEST(CanonicalJson, SortedKeysAndCompactFloats) {
  Json j = {{"b", 1}, {"a", 0.1234567}, {"c", -0.0}, {"d", {{"z", true}, {"y", nullptr}}}};
  EXPECT_EQ(canonical_dump(j), R"({"a":0.123457,"b":1,"c":0,"d":{"y":null,"z":true}})");
}

TEST(CanonicalJson, RejectsNonFinite) {
  Json j = {{"x", std::numeric_limits<double>::quiet_NaN()}};
  EXPECT_THROW(canonical_dump(j), ValidationError);
}

TEST(CanonicalJson, RoundSig6MatchesPrintedForm) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 500; ++i) {
    const double v = u(rng);
    const double r = round_sig6(v);
    EXPECT_EQ(canonical_dump(Json(r)), canonical_dump(Json(v)));
    EXPECT_EQ(round_sig6(r), r);
  }
}
