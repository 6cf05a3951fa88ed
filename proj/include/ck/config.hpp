#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "ck/canonical_json.hpp"

namespace ck {

/// Every pipeline tunable. Defaults are the documented baseline values.
struct PipelineConfig {
  struct Pipeline {
    int parallelism = 1;
    int batch_size = 32;
  } pipeline;

  struct Classify {
    std::string backend = "lexicon";  // "lexicon" or "remote"
    std::string endpoint;
    int timeout_ms = 10000;
    bool allow_fallback = true;
    std::string lexicon_path;  // empty: built-in lexicon
    double context_radius = 10.0;
  } classify;

  struct Semantics {
    double eps = 0.35;
    int min_pts = 2;
    double lambda = 1.0;
    double mu = 0.5;
    double tau_rel = 0.35;
    double related_radius = 15.0;
  } semantics;

  struct Structure {
    double window_width = 20.0;
    int max_sections = 12;
    double min_section_len = 30.0;
    double tau_attach = 0.15;
    int max_entities = 8;
    std::string extractor = "baseline";  // "baseline" or "remote"
    std::string extractor_endpoint;
  } structure;

  struct Presentation {
    double bucket_width = 15.0;
    double width = 1200.0;
    double height = 240.0;
    int keywords_per_bucket = 3;
    double font_min = 10.0;
    double font_max = 28.0;
  } presentation;

  struct Explain {
    std::string endpoint;
    int timeout_ms = 10000;
  } explain;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
  Json to_json() const;
};

namespace config {

using Value = std::variant<bool, std::int64_t, double, std::string>;
/// "section.key" -> value
using Table = std::map<std::string, Value>;

/// Parses the supported TOML subset: `[section]` headers, `key = value`
/// with integer, float, boolean or double-quoted string values, and `#`
/// comments. Throws ParseError with the 1-based line number.
Table parse_toml(std::string_view text);

/// Applies a table onto the defaults, rejecting unknown keys and wrong
/// types, then validates.
PipelineConfig from_table(const Table& table);

PipelineConfig parse(std::string_view text);

/// Relative lexicon paths are resolved against the config file's directory.
PipelineConfig load(const std::filesystem::path& path);

}  // namespace config
}  // namespace ck
