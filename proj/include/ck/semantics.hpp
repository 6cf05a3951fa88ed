#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ck/classify.hpp"

namespace ck {

inline constexpr std::size_t kEmbeddingDim = 256;

/// Hashed character n-gram profile, L2-normalized; all zero for blank text.
using Embedding = std::array<float, kEmbeddingDim>;

struct DanmakuCluster {
  int cluster_id = 0;
  DisplayCategory category = DisplayCategory::InterpretationNeutral;
  std::vector<std::string> member_ids;
  std::string representative_id;
  int window_id = 0;

  std::size_t size() const { return member_ids.size(); }

  bool operator==(const DanmakuCluster&) const = default;
};

struct SegmentAssignment {
  std::string comment_id;
  int window_id = 0;
  double score = 0.0;
  double delay = 0.0;

  bool operator==(const SegmentAssignment&) const = default;
};

namespace semantics {

inline constexpr int kNoise = -1;

/// Character 2- and 3-grams of the folded, whitespace-collapsed text (padded
/// with one space on each side), FNV-1a 64 hashed into 256 buckets.
Embedding embed(std::string_view text);

double norm(const Embedding& v);

/// Cosine similarity; 0 when either vector is zero.
double cosine(const Embedding& a, const Embedding& b);

/// DBSCAN with distance 1 - cosine. A point is core when at least
/// `min_pts` points (itself included) lie within `eps`. Cluster ids are
/// dense from 0 in order of their lowest core point; border points go to the
/// lowest-id cluster that reaches them; everything else is kNoise.
std::vector<int> dbscan(std::span<const Embedding> points, double eps, int min_pts);

/// A knowledge comment placed in a window, ready for clustering.
struct PlacedComment {
  std::string id;
  double t = 0.0;
  DisplayCategory category = DisplayCategory::InterpretationNeutral;
  int window_id = 0;
  Embedding embedding{};
};

/// Index of the medoid among `members` (indices into `items`): highest mean
/// cosine to the other members, ties to earlier t then lower id.
std::size_t medoid(std::span<const PlacedComment> items, std::span<const std::size_t> members);

/// DBSCAN per (window, category) bucket; noise points become singletons.
/// Clusters come out ordered by window, legend order, then first member.
std::vector<DanmakuCluster> cluster_danmaku(std::span<const PlacedComment> items, double eps,
                                            int min_pts);

struct WindowProfile {
  int index = 0;
  double start = 0.0;
  double end = 0.0;
  Embedding embedding{};
};

struct MappingParams {
  double lambda = 1.0;
  double mu = 0.5;
  double forward_slack = 2.0;
  double max_delay = 30.0;
};

/// Picks the window maximizing lambda*cos - mu*delay/max_delay among windows
/// starting no later than t + forward_slack and ending no more than
/// max_delay before t.
SegmentAssignment map_to_window(std::string_view comment_id, double t, const Embedding& embedding,
                                std::span<const WindowProfile> windows,
                                const MappingParams& params = {});

/// Document frequencies over a comment collection.
struct CorpusStats {
  std::size_t documents = 0;
  std::unordered_map<std::string, std::size_t> df;

  static CorpusStats build(std::span<const std::string> texts);
  double idf(const std::string& token) const;
};

/// Highest TF-IDF non-stopword token; ties to the earliest token. Falls back
/// to the longest token when every token is a stopword, and to "" when the
/// text has no tokens at all.
std::string extract_keyword(std::string_view text, const CorpusStats& stats,
                            const Lexicon& lexicon = Lexicon::builtin());

struct RelatedCandidate {
  std::string id;
  double t = 0.0;
  Embedding embedding{};
  std::optional<std::string> entity;  // label of the attached graph entity
};

struct RelatedHit {
  std::string id;
  double cosine = 0.0;
  double dt = 0.0;  // absolute time distance

  bool operator==(const RelatedHit&) const = default;
};

/// Comments within `radius` seconds of the target that share its attached
/// entity or reach cosine `tau`, by descending cosine then ascending |dt|.
std::vector<RelatedHit> related_danmaku(std::string_view target_id,
                                        std::span<const RelatedCandidate> pool, double radius = 15.0,
                                        double tau = 0.35);

}  // namespace semantics
}  // namespace ck
