#include "ck/ingest.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ck/error.hpp"
#include "ck/text.hpp"

namespace ck::ingest {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(b, i - b));
      b = i + 1;
    }
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

struct XmlState {
  std::vector<DanmakuComment> comments;
  std::unordered_set<std::string> seen_ids;
  std::size_t skipped = 0;
  std::string video_id;

  bool in_d = false;
  bool in_chatid = false;
  std::string p_attr;
  bool has_p = false;
  std::string buffer;

  void finish_d() {
    auto comment = make_comment();
    if (!comment) {
      ++skipped;
      return;
    }
    if (!seen_ids.insert(comment->id).second) {
      ++skipped;
      return;
    }
    comments.push_back(std::move(*comment));
  }

  std::optional<DanmakuComment> make_comment() const {
    if (!has_p) return std::nullopt;
    const auto fields = split(p_attr, ',');
    if (fields.size() < 8) return std::nullopt;
    DanmakuComment c;
    if (!parse_number(fields[0], c.t) || !std::isfinite(c.t) || c.t < 0.0) return std::nullopt;
    c.t = quantize_ms(c.t);
    if (!parse_number(fields[1], c.display_mode)) return std::nullopt;
    long long color = 0;
    if (!parse_number(fields[3], color) || color < 0 || color > 0xFFFFFF) return std::nullopt;
    c.color = static_cast<std::uint32_t>(color);
    if (!fields[4].empty()) {
      std::int64_t posted = 0;
      if (!parse_number(fields[4], posted)) return std::nullopt;
      c.posted_at = posted;
    }
    c.user_hash = std::string(fields[6]);
    c.id = text::trim(fields[7]);
    if (c.id.empty()) return std::nullopt;
    c.text = text::trim(buffer);
    if (c.text.empty()) return std::nullopt;
    c.video_id = video_id;
    return c;
  }
};

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<XmlState*>(data);
  const std::string_view tag(name);
  if (tag == "d") {
    st->in_d = true;
    st->has_p = false;
    st->p_attr.clear();
    st->buffer.clear();
    for (int i = 0; attrs[i] != nullptr; i += 2) {
      if (std::string_view(attrs[i]) == "p") {
        st->p_attr = attrs[i + 1];
        st->has_p = true;
      }
    }
  } else if (tag == "chatid") {
    st->in_chatid = true;
    st->video_id.clear();
  }
}

void XMLCALL on_end(void* data, const XML_Char* name) {
  auto* st = static_cast<XmlState*>(data);
  const std::string_view tag(name);
  if (tag == "d" && st->in_d) {
    st->in_d = false;
    st->finish_d();
  } else if (tag == "chatid") {
    st->in_chatid = false;
    st->video_id = text::trim(st->video_id);
  }
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* st = static_cast<XmlState*>(data);
  if (st->in_d) {
    st->buffer.append(s, static_cast<std::size_t>(len));
  } else if (st->in_chatid) {
    st->video_id.append(s, static_cast<std::size_t>(len));
  }
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

double srt_seconds(const std::smatch& m, int base) {
  const auto h = std::stod(m[base].str());
  const auto mi = std::stod(m[base + 1].str());
  const auto s = std::stod(m[base + 2].str());
  const auto ms = std::stod(m[base + 3].str());
  return h * 3600.0 + mi * 60.0 + s + ms / 1000.0;
}

std::vector<std::string> split_lines(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  std::vector<std::string> lines;
  std::string cur;
  for (char c : bytes) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() && cur.back() == '\r') cur.pop_back();
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

std::vector<TranscriptLine> parse_srt(std::string_view bytes) {
  static const std::regex kTiming(
      R"(^\s*(\d+):(\d{1,2}):(\d{1,2})[,](\d{1,3})\s*-->\s*(\d+):(\d{1,2}):(\d{1,2})[,](\d{1,3})(\s.*)?$)");
  const auto lines = split_lines(bytes);
  std::vector<TranscriptLine> out;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (text::trim(lines[i]).empty()) {
      ++i;
      continue;
    }
    const auto index_line = text::trim(lines[i]);
    int index = 0;
    if (!parse_number(std::string_view(index_line), index)) {
      throw ParseError("SRT: expected cue index at line " + std::to_string(i + 1), i + 1);
    }
    ++i;
    std::smatch m;
    if (i >= lines.size() || !std::regex_match(lines[i], m, kTiming)) {
      throw ParseError("SRT: malformed timestamp at line " + std::to_string(i + 1), i + 1);
    }
    TranscriptLine line;
    line.index = index;
    line.start = srt_seconds(m, 1);
    line.end = srt_seconds(m, 5);
    ++i;
    std::string body;
    while (i < lines.size() && !text::trim(lines[i]).empty()) {
      if (!body.empty()) body += ' ';
      body += text::trim(lines[i]);
      ++i;
    }
    line.text = std::move(body);
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<TranscriptLine> parse_lines_json(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("transcript JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) throw ValidationError("transcript JSON: top level must be an array");
  std::vector<TranscriptLine> out;
  int index = 0;
  for (const auto& item : doc) {
    const auto where = "transcript JSON element " + std::to_string(index);
    if (!item.is_object() || !item.contains("start") || !item.contains("end") ||
        !item.contains("text") || !item["start"].is_number() || !item["end"].is_number() ||
        !item["text"].is_string()) {
      throw ValidationError(where + ": expected {start: number, end: number, text: string}");
    }
    TranscriptLine line;
    line.index = index++;
    line.start = item["start"].get<double>();
    line.end = item["end"].get<double>();
    line.text = text::trim(item["text"].get<std::string>());
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

std::int64_t to_ms(double seconds) { return std::llround(seconds * 1000.0); }

double quantize_ms(double seconds) { return from_ms(to_ms(seconds)); }

DanmakuParseResult parse_danmaku_xml(std::string_view bytes) {
  XmlState state;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(
      XML_ParserCreate("UTF-8"));
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    const auto offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
    throw ParseError("danmaku XML: " + std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) +
                         " at byte " + std::to_string(offset),
                     offset);
  }
  if (state.comments.empty()) {
    throw EmptyInputError("danmaku XML: no valid <d> elements (" +
                          std::to_string(state.skipped) + " skipped)");
  }
  std::stable_sort(state.comments.begin(), state.comments.end(),
                   [](const auto& a, const auto& b) { return a.t < b.t; });
  for (auto& c : state.comments) c.video_id = state.video_id;
  return DanmakuParseResult{std::move(state.comments), state.skipped, state.video_id};
}

TranscriptFormat transcript_format_from_string(std::string_view tag) {
  if (tag == "srt") return TranscriptFormat::Srt;
  if (tag == "lines-json" || tag == "json") return TranscriptFormat::LinesJson;
  throw ValidationError("unknown transcript format '" + std::string(tag) + "'");
}

TranscriptParseResult parse_transcript(std::string_view bytes, TranscriptFormat format) {
  if (text::trim(bytes).empty()) throw EmptyInputError("transcript: empty input");
  auto lines = format == TranscriptFormat::Srt ? parse_srt(bytes) : parse_lines_json(bytes);
  if (lines.empty()) throw EmptyInputError("transcript: no lines");
  for (const auto& line : lines) {
    if (!std::isfinite(line.start) || !std::isfinite(line.end) || line.start < 0.0) {
      throw ValidationError("transcript line " + std::to_string(line.index) +
                            ": invalid timestamps");
    }
    if (line.end <= line.start) {
      throw ValidationError("transcript line " + std::to_string(line.index) +
                            ": end must be after start");
    }
    if (line.text.empty()) {
      throw ValidationError("transcript line " + std::to_string(line.index) + ": empty text");
    }
  }
  std::stable_sort(lines.begin(), lines.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (auto& line : lines) {
    line.start = quantize_ms(line.start);
    line.end = quantize_ms(line.end);
  }
  TranscriptParseResult result;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0 && lines[i].start < lines[i - 1].end) {
      result.warnings.push_back("transcript lines " + std::to_string(lines[i - 1].index) +
                                " and " + std::to_string(lines[i].index) + " overlap");
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i) lines[i].index = static_cast<int>(i);
  result.lines = std::move(lines);
  return result;
}

VideoMeta parse_meta(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("meta JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ValidationError("meta JSON: expected an object");
  VideoMeta meta;
  try {
    meta.video_id = doc.at("video_id").get<std::string>();
    meta.title = doc.value("title", std::string());
    meta.duration = doc.at("duration").get<double>();
    meta.domain_tag = doc.value("domain_tag", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("meta JSON: ") + e.what());
  }
  if (meta.video_id.empty()) throw ValidationError("meta JSON: empty video_id");
  if (!std::isfinite(meta.duration)) throw ValidationError("meta JSON: duration must be finite");
  meta.duration = quantize_ms(meta.duration);
  if (!(meta.duration > 0.0)) throw ValidationError("meta JSON: duration must be > 0");
  return meta;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus assemble_corpus(std::string_view danmaku_xml, std::string_view transcript,
                       TranscriptFormat format, std::string_view meta_json) {
  Corpus corpus;
  corpus.meta = parse_meta(meta_json);
  auto parsed_transcript = parse_transcript(transcript, format);
  auto parsed = parse_danmaku_xml(danmaku_xml);
  if (!parsed.video_id.empty() && parsed.video_id != corpus.meta.video_id) {
    throw ValidationError("video_id mismatch: meta '" + corpus.meta.video_id +
                          "' vs danmaku '" + parsed.video_id + "'");
  }
  corpus.lines = std::move(parsed_transcript.lines);
  corpus.warnings = std::move(parsed_transcript.warnings);
  corpus.skipped_elements = parsed.skipped;
  const double limit = corpus.meta.duration + kForwardSlack;
  for (auto& c : parsed.comments) {
    if (c.t > limit) {
      ++corpus.dropped_comments;
      corpus.warnings.push_back("comment " + c.id + " at t=" + std::to_string(c.t) +
                                " beyond duration; dropped");
      continue;
    }
    c.video_id = corpus.meta.video_id;
    corpus.comments.push_back(std::move(c));
  }
  auto h = text::fnv1a64(meta_json);
  h = text::fnv1a64(std::string_view("\x1f", 1), h);
  h = text::fnv1a64(transcript, h);
  h = text::fnv1a64(std::string_view("\x1f", 1), h);
  corpus.input_hash = text::fnv1a64(danmaku_xml, h);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& danmaku_path,
                   const std::filesystem::path& transcript_path,
                   const std::filesystem::path& meta_path) {
  const auto danmaku = read_file(danmaku_path);
  const auto transcript = read_file(transcript_path);
  const auto meta = read_file(meta_path);
  const auto format = transcript_path.extension() == ".srt" ? TranscriptFormat::Srt
                                                            : TranscriptFormat::LinesJson;
  return assemble_corpus(danmaku, transcript, format, meta);
}

}  // namespace ck::ingest
