#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ck/canonical_json.hpp"
#include "ck/classify.hpp"
#include "ck/ingest.hpp"
#include "ck/presentation.hpp"
#include "ck/semantics.hpp"
#include "ck/structure.hpp"

namespace ck {

inline constexpr int kBundleSchemaVersion = 1;
inline constexpr const char* kPipelineVersion = "ck-pipeline/1.0";

struct BundleComment {
  DanmakuComment comment;
  KnowledgeLabel label = KnowledgeLabel::none();
  std::optional<int> cluster_id;  // set for knowledge comments
  std::string keyword;

  bool operator==(const BundleComment&) const = default;
};

struct Provenance {
  std::string pipeline_version = kPipelineVersion;
  std::string classifier;
  std::string extractor;
  std::string lexicon;
  Json tunables = Json::object();
  std::string input_hash;
  std::size_t comment_count = 0;
  std::size_t knowledge_count = 0;
  std::size_t cluster_count = 0;
  std::size_t classifier_fallbacks = 0;
  std::size_t extractor_fallbacks = 0;
  std::size_t skipped_elements = 0;
  std::size_t dropped_comments = 0;
  std::vector<std::string> warnings;

  bool operator==(const Provenance&) const = default;
};

struct StreamData {
  double bucket_width = 15.0;
  std::vector<StreamBucket> buckets;
  WordstreamLayout layout;

  bool operator==(const StreamData&) const = default;
};

/// Complete, cross-referenced pipeline output for one video.
struct KnowledgeBundle {
  VideoMeta meta;
  std::vector<TranscriptLine> transcript;
  std::vector<VideoSection> sections;
  std::vector<KgWindow> windows;
  std::vector<BundleComment> comments;
  std::vector<SegmentAssignment> assignments;
  std::vector<DanmakuCluster> clusters;
  std::vector<KnowledgeGraph> graphs;  // one per window, same order
  StreamData wordstream;
  Provenance provenance;

  bool operator==(const KnowledgeBundle&) const = default;
};

namespace bundle {

// Times are stored as integer milliseconds (`*_ms`); every other number
// goes through canonical_dump's 6-significant-digit formatting.
Json comment_to_json(const BundleComment& c);
BundleComment comment_from_json(const Json& j);
Json section_to_json(const VideoSection& s);
Json line_to_json(const TranscriptLine& l);
Json window_to_json(const KgWindow& w);
Json cluster_to_json(const DanmakuCluster& c);
Json graph_to_json(const KnowledgeGraph& g);
Json buckets_to_json(std::span<const StreamBucket> buckets);
Json layout_to_json(const WordstreamLayout& layout);
Json meta_to_json(const VideoMeta& m);

Json to_json(const KnowledgeBundle& b);
/// Decodes and runs validate(). Throws ValidationError naming the failing
/// field or reference.
KnowledgeBundle from_json(const Json& j);

/// Checks every invariant: ids unique, comment -> cluster -> window -> graph
/// references resolve, sections and windows tile [0, duration], graph edges
/// point at existing nodes.
void validate(const KnowledgeBundle& b);

std::string serialize(const KnowledgeBundle& b);
/// Throws ParseError on malformed JSON (including truncation).
KnowledgeBundle parse(std::string_view text);

void save(const KnowledgeBundle& b, const std::filesystem::path& path);
KnowledgeBundle load(const std::filesystem::path& path);

}  // namespace bundle
}  // namespace ck
