#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ck/canonical_json.hpp"

namespace ck::analysis {

using AliasMap = std::map<std::string, std::vector<std::string>>;

/// Number of entities whose surface form or any alias occurs (folded,
/// whitespace-normalized substring) in at least one text.
int entity_coverage(std::span<const std::string> entities, std::span<const std::string> texts,
                    const AliasMap& aliases);

enum class WilcoxonMethod { Exact, NormalApprox };

struct WilcoxonResult {
  int n_effective = 0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double w = 0.0;  // min(W+, W-)
  /// Normal approximation with tie and 0.5 continuity correction, signed
  /// like (W+ - W-). Reported for both methods.
  double z = 0.0;
  /// Same without continuity correction.
  double z_uncorrected = 0.0;
  double p_two_sided = 1.0;  // from `method`
  double p_normal = 1.0;     // normal approximation, always computed
  WilcoxonMethod method = WilcoxonMethod::Exact;
  /// Rank-biserial (W+ - W-)/(W+ + W-) for exact, |Z|/sqrt(n) otherwise.
  double effect_size = 0.0;
  double rank_biserial = 0.0;
};

/// Largest n_effective handled by exact enumeration.
inline constexpr int kExactCutoff = 12;

/// Signed-rank test on d = a - b. Zero differences are dropped and tied
/// |d| share average ranks. Throws DegenerateInputError if every
/// difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs);

/// Exact two-sided p for the given signed ranks: the share of the 2^n sign
/// assignments whose min(W+, W-) does not exceed the observed one.
double exact_signed_rank_p(std::span<const double> ranks, double w_observed);

struct StudyCorpus {
  std::string video_id;
  std::vector<std::string> entities;
  std::vector<std::string> danmaku;
  std::vector<std::string> comments;
  AliasMap aliases;
};

struct CoveragePair {
  std::string video_id;
  int entity_count = 0;
  int covered_by_danmaku = 0;
  int covered_by_comments = 0;
  double danmaku_rate = 0.0;
  double comment_rate = 0.0;
};

struct CoverageStudy {
  std::vector<CoveragePair> pairs;
  std::optional<WilcoxonResult> test;  // empty when the input is degenerate
  std::string direction;               // "danmaku higher", "comments higher", "no difference"
  std::vector<std::string> notes;

  std::string to_text() const;
  Json to_json() const;
};

/// Per-video coverage rates plus a signed-rank test of danmaku vs comments.
/// Refuses fewer than 2 corpora.
CoverageStudy coverage_study(std::span<const StudyCorpus> corpora);

/// Reads {"corpora": [{video_id, entities, danmaku, comments, aliases}]}.
std::vector<StudyCorpus> parse_study(const Json& doc);

}  // namespace ck::analysis
