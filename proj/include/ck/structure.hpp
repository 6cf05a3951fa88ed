#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ck/classify.hpp"
#include "ck/ingest.hpp"

namespace ck {

/// A directory entry on the progress bar. Lines [first_line, last_line]
/// belong to it.
struct VideoSection {
  int index = 0;
  double start = 0.0;
  double end = 0.0;
  std::string summary;
  int first_line = 0;
  int last_line = 0;

  bool operator==(const VideoSection&) const = default;
};

/// Fixed-width slice carrying one knowledge graph. `text` holds the
/// overlapping transcript lines, newline-separated.
struct KgWindow {
  int index = 0;
  double start = 0.0;
  double end = 0.0;
  std::string text;

  double midpoint() const { return 0.5 * (start + end); }

  bool operator==(const KgWindow&) const = default;
};

struct Entity {
  std::string label;
  double salience = 0.0;
  std::string source_line;  // may be empty for remote extractors

  bool operator==(const Entity&) const = default;
};

struct Relation {
  std::string subject;
  std::string predicate;
  std::string object;

  bool operator==(const Relation&) const = default;
};

struct Extraction {
  std::vector<Entity> entities;
  std::vector<Relation> relations;

  bool operator==(const Extraction&) const = default;
};

class ExtractorBackend {
 public:
  virtual ~ExtractorBackend() = default;
  virtual Extraction extract(std::string_view text) = 0;
  virtual std::string descriptor() const = 0;
};

namespace structure {

inline constexpr std::size_t kMaxSummaryChars = 120;

struct SegmentOptions {
  int max_sections = 12;
  double min_len = 30.0;
  int block_lines = 3;
};

/// TextTiling over 3-line blocks; boundaries at depth-score peaks, taken
/// deepest first while every section stays >= min_len and the count stays
/// <= max_sections. Sections tile [0, duration].
std::vector<VideoSection> segment_video(std::span<const TranscriptLine> lines, double duration,
                                        const SegmentOptions& options = {});

/// Gap similarities and depth scores used by segment_video, exposed for
/// inspection. Entry g describes the gap before line g (entry 0 unused).
struct TilingScores {
  std::vector<double> similarity;
  std::vector<double> depth;
};
TilingScores tiling_scores(std::span<const TranscriptLine> lines, int block_lines = 3);

/// Extractive centroid: the line with highest mean cosine to the others.
std::string summarize_section(std::span<const TranscriptLine> lines);

/// ceil(duration / width) windows; the last may be short.
std::vector<KgWindow> make_windows(double duration, double width = 20.0,
                                   std::span<const TranscriptLine> lines = {});

/// Window index for a timestamp, clamped to the last window.
int window_index_at(double t, double width, std::size_t window_count);

/// Repeated non-stopword tokens become entities (max 8, by count then first
/// position); entity pairs sharing a sentence become relations.
Extraction baseline_extract(std::string_view text, const Lexicon& lexicon = Lexicon::builtin(),
                            std::size_t max_entities = 8);

class BaselineExtractor final : public ExtractorBackend {
 public:
  explicit BaselineExtractor(std::size_t max_entities = 8) : max_entities_(max_entities) {}
  Extraction extract(std::string_view text) override {
    return baseline_extract(text, Lexicon::builtin(), max_entities_);
  }
  std::string descriptor() const override {
    return "baseline-extractor/1 max_entities=" + std::to_string(max_entities_);
  }

 private:
  std::size_t max_entities_;
};

}  // namespace structure

struct EntityNode {
  std::string id;
  std::string label;
  double salience = 0.0;

  bool operator==(const EntityNode&) const = default;
};

struct RelationEdge {
  std::string subject;  // entity node id
  std::string predicate;
  std::string object;

  bool operator==(const RelationEdge&) const = default;
};

struct DanmakuNode {
  std::string id;
  int cluster_id = 0;
  DisplayCategory category = DisplayCategory::InterpretationNeutral;

  bool operator==(const DanmakuNode&) const = default;
};

struct AttachmentEdge {
  std::string from;  // danmaku node id
  std::string to;    // entity node id or the hub id
  double score = 0.0;

  bool operator==(const AttachmentEdge&) const = default;
};

struct KnowledgeGraph {
  static constexpr std::string_view kHubId = "hub";
  static constexpr std::string_view kHubLabel = "segment";

  int window_id = 0;
  std::vector<EntityNode> entities;
  std::vector<RelationEdge> relations;
  std::vector<DanmakuNode> danmaku;
  std::vector<AttachmentEdge> attachments;

  /// Label of the entity a danmaku node hangs off; empty for the hub.
  std::string attached_label(int cluster_id) const;

  bool operator==(const KnowledgeGraph&) const = default;
};

namespace structure {

struct GraphCluster {
  int cluster_id = 0;
  DisplayCategory category = DisplayCategory::InterpretationNeutral;
  std::string representative_text;
};

/// Entities and relations from the extractor plus one danmaku node per
/// cluster, attached to its most similar entity, or to the hub when the
/// best similarity is below `tau_attach`.
KnowledgeGraph build_graph(const KgWindow& window, std::span<const GraphCluster> clusters,
                           ExtractorBackend& extractor, double tau_attach = 0.15);

/// Same, from an already computed extraction.
KnowledgeGraph assemble_graph(const KgWindow& window, const Extraction& extraction,
                              std::span<const GraphCluster> clusters, double tau_attach = 0.15);

}  // namespace structure
}  // namespace ck
