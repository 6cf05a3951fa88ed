#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ck/ingest.hpp"

namespace ck {

enum class Theme { Interpretation, Inquiry, ExperienceSharing, ConceptNoting, SupplementaryKnowledge };

enum class Stance { Positive, Neutral, Negative };

/// The seven user-facing categories, in legend order.
enum class DisplayCategory {
  InterpretationPositive,
  InterpretationNeutral,
  InterpretationNegative,
  Inquiry,
  ExperienceSharing,
  ConceptNoting,
  SupplementaryKnowledge,
};

inline constexpr std::array<DisplayCategory, 7> kDisplayCategories = {
    DisplayCategory::InterpretationPositive, DisplayCategory::InterpretationNeutral,
    DisplayCategory::InterpretationNegative, DisplayCategory::Inquiry,
    DisplayCategory::ExperienceSharing,      DisplayCategory::ConceptNoting,
    DisplayCategory::SupplementaryKnowledge,
};

inline constexpr std::array<Theme, 5> kThemes = {
    Theme::Interpretation, Theme::Inquiry, Theme::ExperienceSharing, Theme::ConceptNoting,
    Theme::SupplementaryKnowledge,
};

std::string_view slug(DisplayCategory c);
std::string_view display_name(DisplayCategory c);
std::string_view theme_name(Theme t);
std::string_view stance_name(Stance s);
std::optional<DisplayCategory> category_from_slug(std::string_view s);
std::size_t legend_index(DisplayCategory c);

/// Outcome of classification. The valid states are: not knowledge; one of
/// four non-interpretation themes; interpretation with one of three stances.
class KnowledgeLabel {
 public:
  static KnowledgeLabel none() { return KnowledgeLabel(); }
  static KnowledgeLabel interpretation(Stance s) { return KnowledgeLabel(Theme::Interpretation, s); }
  /// `t` must not be Interpretation.
  static KnowledgeLabel theme(Theme t);
  static KnowledgeLabel from_category(DisplayCategory c);
  /// "none" or a display-category slug; nullopt for anything else.
  static std::optional<KnowledgeLabel> parse(std::string_view s);

  bool is_knowledge() const { return theme_.has_value(); }
  std::optional<Theme> theme() const { return theme_; }
  std::optional<Stance> stance() const { return stance_; }
  std::optional<DisplayCategory> category() const;
  std::string to_string() const;

  bool operator==(const KnowledgeLabel&) const = default;

 private:
  KnowledgeLabel() = default;
  KnowledgeLabel(Theme t, std::optional<Stance> s) : theme_(t), stance_(s) {}

  std::optional<Theme> theme_;
  std::optional<Stance> stance_;
};

/// Cue lists grouped by bracketed section headers.
class Lexicon {
 public:
  static Lexicon parse(std::string_view text);
  static const Lexicon& builtin();

  const std::vector<std::string>& section(const std::string& name) const;
  bool is_stopword(std::string_view token) const;
  std::string descriptor() const;

 private:
  std::map<std::string, std::vector<std::string>> sections_;
  std::vector<std::string> stopwords_sorted_;
  std::uint64_t hash_ = 0;
};

/// Counts cue occurrences. Latin cues need word boundaries on their Latin
/// ends; CJK cues match anywhere.
std::size_t count_cue_hits(std::string_view text, const std::vector<std::string>& cues);

/// Ordered rule list, first match wins. Total and deterministic.
KnowledgeLabel lexicon_classify(std::string_view text, std::string_view context,
                                const Lexicon& lexicon = Lexicon::builtin());

/// Sign of positive minus negative cue hits.
Stance lexicon_stance(std::string_view text, const Lexicon& lexicon = Lexicon::builtin());

struct ClassifyItem {
  std::string id;
  std::string text;
  std::string context;
};

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  /// One entry per item, in item order; nullopt marks an item the backend
  /// could not label. Throwing fails the whole batch.
  virtual std::vector<std::optional<KnowledgeLabel>> classify_batch(
      std::span<const ClassifyItem> items) = 0;
  virtual std::string descriptor() const = 0;
};

class LexiconBackend final : public ClassifierBackend {
 public:
  explicit LexiconBackend(const Lexicon& lexicon = Lexicon::builtin()) : lexicon_(lexicon) {}
  std::vector<std::optional<KnowledgeLabel>> classify_batch(
      std::span<const ClassifyItem> items) override;
  std::string descriptor() const override;

 private:
  const Lexicon& lexicon_;
};

struct ClassifyOptions {
  int parallelism = 1;
  std::size_t batch_size = 32;
  double context_radius = 10.0;
  bool allow_fallback = true;
};

struct ClassifiedComment {
  DanmakuComment comment;
  KnowledgeLabel label = KnowledgeLabel::none();
};

struct ClassifyResult {
  std::vector<ClassifiedComment> comments;  // input order
  std::size_t fallback_count = 0;
};

/// Transcript text overlapping [t - radius, t + radius].
std::string context_window(std::span<const TranscriptLine> lines, double t, double radius);

/// Labels every comment through `backend`. Failed items are relabeled by
/// the lexicon baseline when fallback is allowed, else BackendError.
ClassifyResult classify_corpus(std::span<const DanmakuComment> comments,
                               std::span<const TranscriptLine> lines, ClassifierBackend& backend,
                               const ClassifyOptions& options,
                               const Lexicon& fallback = Lexicon::builtin());

}  // namespace ck
