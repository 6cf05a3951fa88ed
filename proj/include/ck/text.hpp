#pragma once

// UTF-8 helpers and the tokenizer shared by every text-consuming module.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ck::text {

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_length(std::string_view s);

/// ASCII lowercase plus full-width ASCII forms folded to their narrow
/// counterparts (U+FF01..U+FF5E, U+3000).
char32_t fold(char32_t cp);

bool is_cjk(char32_t cp);
bool is_space(char32_t cp);

std::string trim(std::string_view s);

/// Folded, whitespace-collapsed, trimmed copy of `s`.
std::string normalize(std::string_view s);

/// Keeps at most `max_chars` code points; longer input is cut to
/// `max_chars - 1` code points followed by U+2026.
std::string truncate(std::string_view s, std::size_t max_chars);

struct Token {
  std::string text;      // folded form
  std::size_t position;  // ordinal in the token stream
  bool cjk = false;
};

/// Latin/digit runs become word tokens (possessive "'s" stripped). CJK runs
/// become overlapping character bigrams, or the single character for a run
/// of length one. Everything else separates tokens.
std::vector<Token> tokenize(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed);

std::string hex64(std::uint64_t v);

/// True when `needle` occurs in `haystack` after both are normalized.
bool contains_normalized(std::string_view haystack, std::string_view needle);

}  // namespace ck::text
