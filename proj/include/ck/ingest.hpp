#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ck {

/// One time-synced comment. `t` is video time in seconds.
struct DanmakuComment {
  std::string id;
  std::string video_id;
  double t = 0.0;
  std::optional<std::int64_t> posted_at;
  std::string text;
  int display_mode = 1;
  std::uint32_t color = 0xFFFFFF;
  std::string user_hash;

  bool operator==(const DanmakuComment&) const = default;
};

struct TranscriptLine {
  int index = 0;
  double start = 0.0;
  double end = 0.0;
  std::string text;

  bool operator==(const TranscriptLine&) const = default;
};

struct VideoMeta {
  std::string video_id;
  std::string title;
  double duration = 0.0;
  std::string domain_tag;

  bool operator==(const VideoMeta&) const = default;
};

namespace ingest {

/// Timestamps may run this far past the declared duration.
inline constexpr double kForwardSlack = 5.0;

/// All ingested times are held at millisecond resolution so they survive
/// the bundle's integer-millisecond encoding unchanged.
double quantize_ms(double seconds);
std::int64_t to_ms(double seconds);
inline double from_ms(std::int64_t ms) { return static_cast<double>(ms) / 1000.0; }

struct DanmakuParseResult {
  std::vector<DanmakuComment> comments;  // sorted by t, ties in source order
  std::size_t skipped = 0;
  std::string video_id;  // from <chatid>, empty when absent
};

/// Parses a Bilibili-style export: `<d p="t,mode,size,color,posted,pool,user,rowid">`.
/// Malformed `<d>` elements are skipped and counted. Throws ParseError (byte
/// offset) on invalid XML and EmptyInputError when nothing valid remains.
DanmakuParseResult parse_danmaku_xml(std::string_view bytes);

enum class TranscriptFormat { Srt, LinesJson };

TranscriptFormat transcript_format_from_string(std::string_view tag);

struct TranscriptParseResult {
  std::vector<TranscriptLine> lines;
  std::vector<std::string> warnings;
};

TranscriptParseResult parse_transcript(std::string_view bytes, TranscriptFormat format);

VideoMeta parse_meta(std::string_view bytes);

struct Corpus {
  VideoMeta meta;
  std::vector<TranscriptLine> lines;
  std::vector<DanmakuComment> comments;
  std::vector<std::string> warnings;
  std::size_t skipped_elements = 0;
  std::size_t dropped_comments = 0;
  std::uint64_t input_hash = 0;
};

/// Reads and cross-validates the three inputs. The transcript format is
/// picked from the extension (.srt, otherwise line-array JSON).
Corpus load_corpus(const std::filesystem::path& danmaku_path,
                   const std::filesystem::path& transcript_path,
                   const std::filesystem::path& meta_path);

/// Same as load_corpus over in-memory inputs.
Corpus assemble_corpus(std::string_view danmaku_xml, std::string_view transcript,
                       TranscriptFormat format, std::string_view meta_json);

std::string read_file(const std::filesystem::path& path);

}  // namespace ingest
}  // namespace ck
