#include "ck/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>

#include "ck/error.hpp"
#include "ck/ingest.hpp"
#include "ck/text.hpp"

namespace ck {

namespace {

void require(bool ok, const std::string& key, const std::string& rule) {
  if (!ok) throw ConfigError("config: " + key + " " + rule);
}

std::string unescape(std::string_view quoted, std::size_t line_no) {
  std::string out;
  for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c == '\\') {
      if (i + 2 >= quoted.size()) throw ParseError("config: dangling escape", line_no);
      const char e = quoted[++i];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw ParseError(std::string("config: unknown escape \\") + e, line_no);
      }
    } else {
      out += c;
    }
  }
  return out;
}

config::Value parse_value(std::string_view raw, std::size_t line_no) {
  if (raw.empty()) throw ParseError("config: missing value", line_no);
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw ParseError("config: unterminated string", line_no);
    return unescape(raw, line_no);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::int64_t i = 0;
  auto [pi, ei] = std::from_chars(raw.data(), raw.data() + raw.size(), i);
  if (ei == std::errc() && pi == raw.data() + raw.size()) return i;
  double d = 0.0;
  auto [pd, ed] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
  if (ed == std::errc() && pd == raw.data() + raw.size()) return d;
  throw ParseError("config: cannot parse value '" + std::string(raw) + "'", line_no);
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
    } else if (line[i] == '"') {
      in_string = !in_string;
    } else if (line[i] == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

using Setter = std::function<void(PipelineConfig&, const config::Value&, const std::string&)>;

template <typename T>
Setter field_setter(T PipelineConfig::*section, int T::*field) {
  return [=](PipelineConfig& c, const config::Value& v, const std::string& key) {
    const auto* i = std::get_if<std::int64_t>(&v);
    require(i != nullptr, key, "must be an integer");
    require(*i >= INT32_MIN && *i <= INT32_MAX, key, "is out of range");
    c.*section.*field = static_cast<int>(*i);
  };
}

template <typename T>
Setter field_setter(T PipelineConfig::*section, double T::*field) {
  return [=](PipelineConfig& c, const config::Value& v, const std::string& key) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      c.*section.*field = static_cast<double>(*i);
    } else if (const auto* d = std::get_if<double>(&v)) {
      c.*section.*field = *d;
    } else {
      require(false, key, "must be a number");
    }
  };
}

template <typename T>
Setter field_setter(T PipelineConfig::*section, bool T::*field) {
  return [=](PipelineConfig& c, const config::Value& v, const std::string& key) {
    const auto* b = std::get_if<bool>(&v);
    require(b != nullptr, key, "must be a boolean");
    c.*section.*field = *b;
  };
}

template <typename T>
Setter field_setter(T PipelineConfig::*section, std::string T::*field) {
  return [=](PipelineConfig& c, const config::Value& v, const std::string& key) {
    const auto* s = std::get_if<std::string>(&v);
    require(s != nullptr, key, "must be a string");
    c.*section.*field = *s;
  };
}

const std::map<std::string, Setter>& setters() {
  using C = PipelineConfig;
  static const std::map<std::string, Setter> table = {
      {"pipeline.parallelism", field_setter(&C::pipeline, &C::Pipeline::parallelism)},
      {"pipeline.batch_size", field_setter(&C::pipeline, &C::Pipeline::batch_size)},
      {"classify.backend", field_setter(&C::classify, &C::Classify::backend)},
      {"classify.endpoint", field_setter(&C::classify, &C::Classify::endpoint)},
      {"classify.timeout_ms", field_setter(&C::classify, &C::Classify::timeout_ms)},
      {"classify.allow_fallback", field_setter(&C::classify, &C::Classify::allow_fallback)},
      {"classify.lexicon_path", field_setter(&C::classify, &C::Classify::lexicon_path)},
      {"classify.context_radius", field_setter(&C::classify, &C::Classify::context_radius)},
      {"semantics.eps", field_setter(&C::semantics, &C::Semantics::eps)},
      {"semantics.min_pts", field_setter(&C::semantics, &C::Semantics::min_pts)},
      {"semantics.lambda", field_setter(&C::semantics, &C::Semantics::lambda)},
      {"semantics.mu", field_setter(&C::semantics, &C::Semantics::mu)},
      {"semantics.tau_rel", field_setter(&C::semantics, &C::Semantics::tau_rel)},
      {"semantics.related_radius", field_setter(&C::semantics, &C::Semantics::related_radius)},
      {"structure.window_width", field_setter(&C::structure, &C::Structure::window_width)},
      {"structure.max_sections", field_setter(&C::structure, &C::Structure::max_sections)},
      {"structure.min_section_len", field_setter(&C::structure, &C::Structure::min_section_len)},
      {"structure.tau_attach", field_setter(&C::structure, &C::Structure::tau_attach)},
      {"structure.max_entities", field_setter(&C::structure, &C::Structure::max_entities)},
      {"structure.extractor", field_setter(&C::structure, &C::Structure::extractor)},
      {"structure.extractor_endpoint", field_setter(&C::structure, &C::Structure::extractor_endpoint)},
      {"presentation.bucket_width", field_setter(&C::presentation, &C::Presentation::bucket_width)},
      {"presentation.width", field_setter(&C::presentation, &C::Presentation::width)},
      {"presentation.height", field_setter(&C::presentation, &C::Presentation::height)},
      {"presentation.keywords_per_bucket",
       field_setter(&C::presentation, &C::Presentation::keywords_per_bucket)},
      {"presentation.font_min", field_setter(&C::presentation, &C::Presentation::font_min)},
      {"presentation.font_max", field_setter(&C::presentation, &C::Presentation::font_max)},
      {"explain.endpoint", field_setter(&C::explain, &C::Explain::endpoint)},
      {"explain.timeout_ms", field_setter(&C::explain, &C::Explain::timeout_ms)},
  };
  return table;
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void PipelineConfig::validate() const {
  require(pipeline.parallelism >= 1 && pipeline.parallelism <= 256, "pipeline.parallelism",
          "must be in [1, 256]");
  require(pipeline.batch_size >= 1, "pipeline.batch_size", "must be >= 1");
  require(classify.backend == "lexicon" || classify.backend == "remote", "classify.backend",
          "must be \"lexicon\" or \"remote\"");
  require(classify.backend != "remote" || !classify.endpoint.empty(), "classify.endpoint",
          "is required when classify.backend = \"remote\"");
  require(classify.timeout_ms >= 1, "classify.timeout_ms", "must be >= 1");
  require(non_negative(classify.context_radius), "classify.context_radius", "must be >= 0");
  require(positive(semantics.eps) && semantics.eps <= 2.0, "semantics.eps", "must be in (0, 2]");
  require(semantics.min_pts >= 1, "semantics.min_pts", "must be >= 1");
  require(non_negative(semantics.lambda), "semantics.lambda", "must be >= 0");
  require(non_negative(semantics.mu), "semantics.mu", "must be >= 0");
  require(std::isfinite(semantics.tau_rel) && semantics.tau_rel >= -1.0 &&
              semantics.tau_rel <= 1.0,
          "semantics.tau_rel", "must be in [-1, 1]");
  require(non_negative(semantics.related_radius), "semantics.related_radius", "must be >= 0");
  require(positive(structure.window_width), "structure.window_width", "must be > 0");
  require(structure.max_sections >= 1, "structure.max_sections", "must be >= 1");
  require(non_negative(structure.min_section_len), "structure.min_section_len", "must be >= 0");
  require(std::isfinite(structure.tau_attach) && structure.tau_attach >= -1.0 &&
              structure.tau_attach <= 1.0,
          "structure.tau_attach", "must be in [-1, 1]");
  require(structure.max_entities >= 1, "structure.max_entities", "must be >= 1");
  require(structure.extractor == "baseline" || structure.extractor == "remote",
          "structure.extractor", "must be \"baseline\" or \"remote\"");
  require(structure.extractor != "remote" || !structure.extractor_endpoint.empty(),
          "structure.extractor_endpoint", "is required when structure.extractor = \"remote\"");
  require(positive(presentation.bucket_width), "presentation.bucket_width", "must be > 0");
  require(positive(presentation.width), "presentation.width", "must be > 0");
  require(positive(presentation.height), "presentation.height", "must be > 0");
  require(presentation.keywords_per_bucket >= 0, "presentation.keywords_per_bucket",
          "must be >= 0");
  require(positive(presentation.font_min), "presentation.font_min", "must be > 0");
  require(std::isfinite(presentation.font_max) && presentation.font_max >= presentation.font_min,
          "presentation.font_max", "must be >= presentation.font_min");
  require(explain.timeout_ms >= 1, "explain.timeout_ms", "must be >= 1");
}

Json PipelineConfig::to_json() const {
  return Json{
      {"pipeline", {{"parallelism", pipeline.parallelism}, {"batch_size", pipeline.batch_size}}},
      {"classify",
       {{"backend", classify.backend},
        {"endpoint", classify.endpoint},
        {"timeout_ms", classify.timeout_ms},
        {"allow_fallback", classify.allow_fallback},
        {"lexicon_path", classify.lexicon_path},
        {"context_radius", classify.context_radius}}},
      {"semantics",
       {{"eps", semantics.eps},
        {"min_pts", semantics.min_pts},
        {"lambda", semantics.lambda},
        {"mu", semantics.mu},
        {"tau_rel", semantics.tau_rel},
        {"related_radius", semantics.related_radius}}},
      {"structure",
       {{"window_width", structure.window_width},
        {"max_sections", structure.max_sections},
        {"min_section_len", structure.min_section_len},
        {"tau_attach", structure.tau_attach},
        {"max_entities", structure.max_entities},
        {"extractor", structure.extractor},
        {"extractor_endpoint", structure.extractor_endpoint}}},
      {"presentation",
       {{"bucket_width", presentation.bucket_width},
        {"width", presentation.width},
        {"height", presentation.height},
        {"keywords_per_bucket", presentation.keywords_per_bucket},
        {"font_min", presentation.font_min},
        {"font_max", presentation.font_max}}},
      {"explain", {{"endpoint", explain.endpoint}, {"timeout_ms", explain.timeout_ms}}},
  };
}

namespace config {

Table parse_toml(std::string_view text) {
  Table table;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text::trim(strip_comment(text.substr(pos, nl - pos)));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError("config: malformed section header", line_no);
      }
      section = text::trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected key = value", line_no);
    const auto key = text::trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ParseError("config: empty key", line_no);
    const auto full = section.empty() ? key : section + "." + key;
    if (table.count(full)) throw ParseError("config: duplicate key " + full, line_no);
    table.emplace(full, parse_value(text::trim(std::string_view(line).substr(eq + 1)), line_no));
  }
  return table;
}

PipelineConfig from_table(const Table& table) {
  PipelineConfig cfg;
  const auto& known = setters();
  for (const auto& [key, value] : table) {
    auto it = known.find(key);
    if (it == known.end()) throw ConfigError("config: unknown key " + key);
    it->second(cfg, value, key);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig parse(std::string_view text) { return from_table(parse_toml(text)); }

PipelineConfig load(const std::filesystem::path& path) {
  auto cfg = parse(ingest::read_file(path));
  if (!cfg.classify.lexicon_path.empty()) {
    std::filesystem::path lex(cfg.classify.lexicon_path);
    if (lex.is_relative()) cfg.classify.lexicon_path = (path.parent_path() / lex).string();
  }
  return cfg;
}

}  // namespace config
}  // namespace ck
