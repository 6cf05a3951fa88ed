#include "ck/text.hpp"

#include <cstdio>

namespace ck::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

void flush_word(std::u32string& word, std::vector<Token>& out) {
  while (!word.empty() && word.front() == U'\'') word.erase(word.begin());
  while (!word.empty() && word.back() == U'\'') word.pop_back();
  if (word.size() > 2 && word[word.size() - 2] == U'\'' && word.back() == U's') {
    word.resize(word.size() - 2);
  }
  if (!word.empty()) {
    out.push_back(Token{encode_utf8(word), out.size(), false});
  }
  word.clear();
}

void flush_cjk(std::u32string& run, std::vector<Token>& out) {
  if (run.size() == 1) {
    out.push_back(Token{encode_utf8(run), out.size(), true});
  } else {
    for (std::size_t i = 0; i + 1 < run.size(); ++i) {
      out.push_back(Token{encode_utf8(run.substr(i, 2)), out.size(), true});
    }
  }
  run.clear();
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const auto n = s.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (!ok || overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

std::size_t codepoint_length(std::string_view s) {
  return decode_utf8(s).size();
}

char32_t fold(char32_t cp) {
  if (cp >= 0xFF01 && cp <= 0xFF5E) cp = cp - 0xFF01 + 0x21;
  if (cp == 0x3000) cp = U' ';
  if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
  return cp;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0xAC00 && cp <= 0xD7AF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FA1F);
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
         cp == U'\f' || cp == 0xA0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200B);
}

std::string trim(std::string_view s) {
  const auto cps = decode_utf8(s);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  return encode_utf8(std::u32string_view(cps).substr(b, e - b));
}

std::string normalize(std::string_view s) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : decode_utf8(s)) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(fold(cp));
  }
  return encode_utf8(out);
}

std::string truncate(std::string_view s, std::size_t max_chars) {
  auto cps = decode_utf8(s);
  if (cps.size() <= max_chars) return std::string(s);
  if (max_chars == 0) return {};
  cps.resize(max_chars - 1);
  cps.push_back(0x2026);
  return encode_utf8(cps);
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::u32string word;
  std::u32string cjk;
  const auto cps = decode_utf8(s);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = fold(cps[i]);
    if (is_word_char(cp)) {
      if (!cjk.empty()) flush_cjk(cjk, out);
      word.push_back(cp);
    } else if (cp == U'\'' && !word.empty() && i + 1 < cps.size() &&
               is_word_char(fold(cps[i + 1]))) {
      word.push_back(cp);
    } else if (is_cjk(cp)) {
      if (!word.empty()) flush_word(word, out);
      cjk.push_back(cp);
    } else {
      if (!word.empty()) flush_word(word, out);
      if (!cjk.empty()) flush_cjk(cjk, out);
    }
  }
  if (!word.empty()) flush_word(word, out);
  if (!cjk.empty()) flush_cjk(cjk, out);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  return fnv1a64(bytes, 14695981039346656037ULL);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
  const auto n = normalize(needle);
  if (n.empty()) return false;
  return normalize(haystack).find(n) != std::string::npos;
}

}  // namespace ck::text
