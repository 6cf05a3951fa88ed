#include "ck/classify.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "ck/error.hpp"
#include "ck/text.hpp"

namespace ck {

std::string_view builtin_lexicon_text();  // generated from data/lexicon.txt

namespace {

bool is_ascii_alnum(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9');
}

bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || is_ascii_upper(c); }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool is_word_byte(char c) {
  return is_ascii_alpha(c) || is_ascii_digit(c) || c == '\'';
}

// Folded text with punctuation turned into spaces; apostrophes survive so
// that contractions stay one word.
std::string prepare(std::string_view s) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : text::decode_utf8(s)) {
    cp = text::fold(cp);
    const bool keep = is_ascii_alnum(cp) || cp == U'\'' || text::is_cjk(cp) ||
                      (cp >= 0xC0 && cp <= 0x24F);
    if (!keep) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  return text::encode_utf8(out);
}

std::size_t count_one(std::string_view hay, std::string_view cue) {
  if (cue.empty()) return 0;
  const bool latin_head = is_word_byte(cue.front());
  const bool latin_tail = is_word_byte(cue.back());
  std::size_t hits = 0;
  std::size_t pos = hay.find(cue);
  while (pos != std::string_view::npos) {
    const std::size_t end = pos + cue.size();
    const bool left_ok = !latin_head || pos == 0 || !is_word_byte(hay[pos - 1]);
    const bool right_ok = !latin_tail || end == hay.size() || !is_word_byte(hay[end]);
    if (left_ok && right_ok) {
      ++hits;
      pos = hay.find(cue, end);
    } else {
      pos = hay.find(cue, pos + 1);
    }
  }
  return hits;
}

struct LatinWord {
  std::string raw;
  bool sentence_initial = false;
};

std::vector<LatinWord> latin_words(std::string_view raw) {
  std::vector<LatinWord> out;
  bool initial = true;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (!cur.empty()) {
      out.push_back(LatinWord{cur, initial});
      initial = false;
    }
    cur.clear();
  };
  for (char32_t cp : text::decode_utf8(raw)) {
    cp = (cp >= 0xFF01 && cp <= 0xFF5E) ? cp - 0xFF01 + 0x21 : cp;
    if (is_ascii_alnum(cp) || (cp == U'\'' && !cur.empty())) {
      cur.push_back(static_cast<char>(cp));
      continue;
    }
    flush();
    if (cp == U'.' || cp == U'!' || cp == U'?' || cp == U';' || cp == U':' || cp == 0x3002) {
      initial = true;
    }
  }
  flush();
  return out;
}

bool has_quoted_span(std::string_view raw) {
  const auto cps = text::decode_utf8(raw);
  auto has_pair = [&](char32_t open, char32_t close) {
    auto a = std::find(cps.begin(), cps.end(), open);
    if (a == cps.end()) return false;
    auto b = std::find(a + 1, cps.end(), close);
    return b != cps.end() && b - a > 1;
  };
  return has_pair(U'"', U'"') || has_pair(0x201C, 0x201D) || has_pair(0x300C, 0x300D) ||
         has_pair(0x300A, 0x300B);
}

// Capitalized mid-sentence words, acronyms, internal capitals ("D'Alembert"),
// and letter-digit mixes ("H2O").
std::vector<std::string> term_like_words(std::string_view raw, const Lexicon& lexicon) {
  std::vector<std::string> out;
  for (const auto& w : latin_words(raw)) {
    if (w.raw.size() < 2) continue;
    int upper = 0;
    bool internal_upper = false;
    bool digit = false;
    bool alpha = false;
    for (std::size_t i = 0; i < w.raw.size(); ++i) {
      const char c = w.raw[i];
      if (is_ascii_upper(c)) {
        ++upper;
        if (i > 0) internal_upper = true;
      }
      digit |= is_ascii_digit(c);
      alpha |= is_ascii_alpha(c);
    }
    const bool capitalized_mid = !w.sentence_initial && is_ascii_upper(w.raw[0]) &&
                                 w.raw.size() >= 3;
    const bool term = internal_upper || upper >= 2 || (digit && alpha) || capitalized_mid;
    if (term && w.raw != "I" && !lexicon.is_stopword(text::normalize(w.raw))) {
      out.push_back(w.raw);
    }
  }
  return out;
}

bool is_noise(std::string_view raw, const std::string& prepared, const Lexicon& lexicon) {
  std::u32string visible;
  for (char32_t cp : text::decode_utf8(raw)) {
    if (!text::is_space(cp)) visible.push_back(text::fold(cp));
  }
  if (visible.size() < 2) return true;
  const std::set<char32_t> distinct(visible.begin(), visible.end());
  if (distinct.size() == 1) return true;
  if (distinct.size() == 2 && visible.size() >= 3) return true;
  const bool has_content = std::any_of(visible.begin(), visible.end(), [](char32_t cp) {
    return is_ascii_alnum(cp) || text::is_cjk(cp) || (cp >= 0xC0 && cp <= 0x24F);
  });
  if (!has_content) return true;
  const auto& noise = lexicon.section("noise");
  return std::find(noise.begin(), noise.end(), prepared) != noise.end();
}

}  // namespace

std::string_view slug(DisplayCategory c) {
  switch (c) {
    case DisplayCategory::InterpretationPositive: return "interpretation-positive";
    case DisplayCategory::InterpretationNeutral: return "interpretation-neutral";
    case DisplayCategory::InterpretationNegative: return "interpretation-negative";
    case DisplayCategory::Inquiry: return "inquiry";
    case DisplayCategory::ExperienceSharing: return "experience-sharing";
    case DisplayCategory::ConceptNoting: return "concept-noting";
    case DisplayCategory::SupplementaryKnowledge: return "supplementary-knowledge";
  }
  return "";
}

std::string_view display_name(DisplayCategory c) {
  switch (c) {
    case DisplayCategory::InterpretationPositive: return "Interpretation (positive)";
    case DisplayCategory::InterpretationNeutral: return "Interpretation (neutral)";
    case DisplayCategory::InterpretationNegative: return "Interpretation (negative)";
    case DisplayCategory::Inquiry: return "Inquiry";
    case DisplayCategory::ExperienceSharing: return "Experience sharing";
    case DisplayCategory::ConceptNoting: return "Concept noting";
    case DisplayCategory::SupplementaryKnowledge: return "Supplementary knowledge";
  }
  return "";
}

std::string_view theme_name(Theme t) {
  switch (t) {
    case Theme::Interpretation: return "Interpretation";
    case Theme::Inquiry: return "Inquiry";
    case Theme::ExperienceSharing: return "Experience sharing";
    case Theme::ConceptNoting: return "Concept noting";
    case Theme::SupplementaryKnowledge: return "Supplementary knowledge";
  }
  return "";
}

std::string_view stance_name(Stance s) {
  switch (s) {
    case Stance::Positive: return "positive";
    case Stance::Neutral: return "neutral";
    case Stance::Negative: return "negative";
  }
  return "";
}

std::optional<DisplayCategory> category_from_slug(std::string_view s) {
  for (auto c : kDisplayCategories) {
    if (slug(c) == s) return c;
  }
  return std::nullopt;
}

std::size_t legend_index(DisplayCategory c) { return static_cast<std::size_t>(c); }

KnowledgeLabel KnowledgeLabel::theme(Theme t) {
  if (t == Theme::Interpretation) {
    throw std::invalid_argument("interpretation labels need a stance");
  }
  return KnowledgeLabel(t, std::nullopt);
}

KnowledgeLabel KnowledgeLabel::from_category(DisplayCategory c) {
  switch (c) {
    case DisplayCategory::InterpretationPositive: return interpretation(Stance::Positive);
    case DisplayCategory::InterpretationNeutral: return interpretation(Stance::Neutral);
    case DisplayCategory::InterpretationNegative: return interpretation(Stance::Negative);
    case DisplayCategory::Inquiry: return theme(Theme::Inquiry);
    case DisplayCategory::ExperienceSharing: return theme(Theme::ExperienceSharing);
    case DisplayCategory::ConceptNoting: return theme(Theme::ConceptNoting);
    case DisplayCategory::SupplementaryKnowledge: return theme(Theme::SupplementaryKnowledge);
  }
  return none();
}

std::optional<KnowledgeLabel> KnowledgeLabel::parse(std::string_view s) {
  if (s == "none") return none();
  if (auto c = category_from_slug(s)) return from_category(*c);
  return std::nullopt;
}

std::optional<DisplayCategory> KnowledgeLabel::category() const {
  if (!theme_) return std::nullopt;
  switch (*theme_) {
    case Theme::Interpretation:
      switch (stance_.value_or(Stance::Neutral)) {
        case Stance::Positive: return DisplayCategory::InterpretationPositive;
        case Stance::Neutral: return DisplayCategory::InterpretationNeutral;
        case Stance::Negative: return DisplayCategory::InterpretationNegative;
      }
      break;
    case Theme::Inquiry: return DisplayCategory::Inquiry;
    case Theme::ExperienceSharing: return DisplayCategory::ExperienceSharing;
    case Theme::ConceptNoting: return DisplayCategory::ConceptNoting;
    case Theme::SupplementaryKnowledge: return DisplayCategory::SupplementaryKnowledge;
  }
  return std::nullopt;
}

std::string KnowledgeLabel::to_string() const {
  const auto c = category();
  return c ? std::string(slug(*c)) : std::string("none");
}

Lexicon Lexicon::parse(std::string_view body) {
  Lexicon lex;
  lex.hash_ = text::fnv1a64(body);
  std::string current;
  std::size_t b = 0;
  while (b <= body.size()) {
    auto e = body.find('\n', b);
    if (e == std::string_view::npos) e = body.size();
    const auto line = text::trim(body.substr(b, e - b));
    b = e + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      current = line.substr(1, line.size() - 2);
      lex.sections_[current];
      continue;
    }
    if (current.empty()) {
      throw ConfigError("lexicon: cue '" + line + "' outside any [section]");
    }
    auto cue = prepare(line);
    if (!cue.empty()) lex.sections_[current].push_back(std::move(cue));
  }
  for (const auto& w : lex.section("stopwords")) lex.stopwords_sorted_.push_back(w);
  std::sort(lex.stopwords_sorted_.begin(), lex.stopwords_sorted_.end());
  return lex;
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(builtin_lexicon_text());
  return lex;
}

const std::vector<std::string>& Lexicon::section(const std::string& name) const {
  static const std::vector<std::string> empty;
  auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

bool Lexicon::is_stopword(std::string_view token) const {
  return std::binary_search(stopwords_sorted_.begin(), stopwords_sorted_.end(), token);
}

std::string Lexicon::descriptor() const { return "lexicon:" + text::hex64(hash_); }

std::size_t count_cue_hits(std::string_view text_in, const std::vector<std::string>& cues) {
  const auto hay = prepare(text_in);
  std::size_t hits = 0;
  for (const auto& cue : cues) hits += count_one(hay, cue);
  return hits;
}

Stance lexicon_stance(std::string_view text_in, const Lexicon& lexicon) {
  const auto pos = count_cue_hits(text_in, lexicon.section("positive"));
  const auto neg = count_cue_hits(text_in, lexicon.section("negative"));
  if (pos > neg) return Stance::Positive;
  if (neg > pos) return Stance::Negative;
  return Stance::Neutral;
}

KnowledgeLabel lexicon_classify(std::string_view raw_in, std::string_view context,
                                const Lexicon& lexicon) {
  const auto raw = text::trim(raw_in);
  const auto prepared = prepare(raw);
  // (1) noise
  if (is_noise(raw, prepared, lexicon)) return KnowledgeLabel::none();

  auto section_hits = [&](const char* name) {
    std::size_t n = 0;
    for (const auto& cue : lexicon.section(name)) n += count_one(prepared, cue);
    return n;
  };

  // (2) questions
  const auto folded = text::normalize(raw);
  const auto tokens = text::tokenize(raw);
  const auto& leads = lexicon.section("interrogative_lead");
  const auto& not_leads = lexicon.section("statement_lead");
  const bool statement_lead = std::any_of(not_leads.begin(), not_leads.end(), [&](const auto& cue) {
    return prepared.starts_with(cue) &&
           (prepared.size() == cue.size() || !is_word_byte(prepared[cue.size()]));
  });
  const bool lead_question = !tokens.empty() && !tokens.front().cjk && !statement_lead &&
                             std::find(leads.begin(), leads.end(), tokens.front().text) != leads.end();
  if (folded.find('?') != std::string::npos || lead_question || section_hits("interrogative") > 0) {
    return KnowledgeLabel::theme(Theme::Inquiry);
  }
  // (3) first-person experience
  if (section_hits("first_person") > 0 && section_hits("experience") > 0) {
    return KnowledgeLabel::theme(Theme::ExperienceSharing);
  }
  // (4) short concept mentions
  const auto terms = term_like_words(raw, lexicon);
  const auto dictionary_hits = section_hits("terms");
  if (tokens.size() <= 6 && section_hits("verb") == 0 &&
      (dictionary_hits > 0 || !terms.empty() || has_quoted_span(raw))) {
    return KnowledgeLabel::theme(Theme::ConceptNoting);
  }
  // (5) supplementary cue, or a named term the local transcript never mentions
  if (section_hits("supplement") > 0) return KnowledgeLabel::theme(Theme::SupplementaryKnowledge);
  if (!text::trim(context).empty()) {
    std::vector<std::string> named = terms;
    for (const auto& cue : lexicon.section("terms")) {
      if (count_one(prepared, cue) > 0) named.push_back(cue);
    }
    for (const auto& term : named) {
      if (!text::contains_normalized(context, term)) {
        return KnowledgeLabel::theme(Theme::SupplementaryKnowledge);
      }
    }
  }
  // (6) opinions; stance cues count as opinion cues
  if (section_hits("opinion") + section_hits("positive") + section_hits("negative") > 0) {
    return KnowledgeLabel::interpretation(lexicon_stance(raw, lexicon));
  }
  // (7)
  return KnowledgeLabel::none();
}

std::vector<std::optional<KnowledgeLabel>> LexiconBackend::classify_batch(
    std::span<const ClassifyItem> items) {
  std::vector<std::optional<KnowledgeLabel>> out;
  out.reserve(items.size());
  for (const auto& item : items) out.emplace_back(lexicon_classify(item.text, item.context, lexicon_));
  return out;
}

std::string LexiconBackend::descriptor() const {
  return "lexicon-baseline/1 " + lexicon_.descriptor();
}

std::string context_window(std::span<const TranscriptLine> lines, double t, double radius) {
  std::string out;
  const double lo = t - radius;
  const double hi = t + radius;
  for (const auto& line : lines) {
    if (line.start > hi) break;
    if (line.end < lo) continue;
    if (!out.empty()) out += ' ';
    out += line.text;
  }
  return out;
}

ClassifyResult classify_corpus(std::span<const DanmakuComment> comments,
                               std::span<const TranscriptLine> lines, ClassifierBackend& backend,
                               const ClassifyOptions& options, const Lexicon& fallback) {
  if (options.parallelism < 1) throw ConfigError("classify: parallelism must be >= 1");
  if (options.batch_size < 1) throw ConfigError("classify: batch_size must be >= 1");

  std::vector<ClassifyItem> items;
  items.reserve(comments.size());
  for (const auto& c : comments) {
    items.push_back(ClassifyItem{c.id, c.text, context_window(lines, c.t, options.context_radius)});
  }

  std::vector<std::optional<KnowledgeLabel>> labels(items.size());
  const std::size_t batches = (items.size() + options.batch_size - 1) / options.batch_size;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    for (std::size_t b = next++; b < batches; b = next++) {
      const std::size_t lo = b * options.batch_size;
      const std::size_t hi = std::min(items.size(), lo + options.batch_size);
      std::span<const ClassifyItem> batch(items.data() + lo, hi - lo);
      try {
        auto result = backend.classify_batch(batch);
        if (result.size() != batch.size()) {
          throw BackendError("backend returned " + std::to_string(result.size()) +
                             " labels for " + std::to_string(batch.size()) + " items");
        }
        for (std::size_t i = 0; i < result.size(); ++i) labels[lo + i] = result[i];
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(options.parallelism),
                                             std::max<std::size_t>(batches, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  ClassifyResult result;
  result.comments.reserve(comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    if (!labels[i]) {
      if (!options.allow_fallback) {
        throw BackendError("classifier backend failed for comment " + comments[i].id +
                           (first_error.empty() ? std::string() : ": " + first_error));
      }
      labels[i] = lexicon_classify(items[i].text, items[i].context, fallback);
      ++result.fallback_count;
    }
    result.comments.push_back(ClassifiedComment{comments[i], *labels[i]});
  }
  return result;
}

}  // namespace ck
