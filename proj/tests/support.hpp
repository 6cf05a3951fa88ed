#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ck/bundle.hpp"
#include "ck/config.hpp"
#include "ck/ingest.hpp"
#include "ck/pipeline.hpp"
#include "ck/semantics.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return CK_SOURCE_DIR; }
inline std::filesystem::path fixture_dir() { return source_dir() / "data" / "fixture"; }
inline std::filesystem::path golden_dir() { return source_dir() / "tests" / "golden"; }

inline const ck::ingest::Corpus& fixture_corpus() {
  static const auto corpus =
      ck::ingest::load_corpus(fixture_dir() / "danmaku.xml", fixture_dir() / "transcript.srt",
                              fixture_dir() / "meta.json");
  return corpus;
}

inline const ck::KnowledgeBundle& fixture_bundle() {
  static const auto bundle = ck::run_pipeline(fixture_corpus(), ck::PipelineConfig{});
  return bundle;
}

struct LabeledComment {
  std::string label;  // "none" or a display-category slug
  std::string context;
  std::string text;
};

// Tab-separated label, context, text; '#' lines are comments.
inline std::vector<LabeledComment> labeled_fixture() {
  std::ifstream in(source_dir() / "tests" / "data" / "distribution_fixture.tsv");
  std::vector<LabeledComment> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    LabeledComment c;
    std::getline(fields, c.label, '\t');
    std::getline(fields, c.context, '\t');
    std::getline(fields, c.text);
    out.push_back(c);
  }
  return out;
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "nitrogen", "legume",   "nodule",  "bacteria", "enzyme",  "oxygen",   "soil",
      "protein",  "root",     "ammonia", "plant",    "cell",    "membrane", "energy",
      "photon",   "electron", "orbit",   "gravity",  "planet",  "comet",    "galaxy",
      "prime",    "integral", "limit",   "series",   "vector",  "matrix",   "graph"};
  return words;
}

inline std::string random_sentence(std::mt19937& rng, int min_words, int max_words) {
  const auto& v = vocabulary();
  const int n = uniform_int(rng, min_words, max_words);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(v.size()) - 1))];
  }
  return s;
}

// Clustered unit vectors: a few random centers in a low-dimensional
// subspace plus noise, so instances have cores, borders and noise.
inline std::vector<ck::Embedding> random_embeddings(std::mt19937& rng, std::size_t n) {
  const int dims = uniform_int(rng, 3, 8);
  const int centers = uniform_int(rng, 1, 5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> c(static_cast<std::size_t>(centers), std::vector<double>(dims));
  for (auto& v : c)
    for (auto& x : v) x = gauss(rng);
  const double spread = uniform(rng, 0.05, 0.8);
  std::vector<ck::Embedding> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& base = c[static_cast<std::size_t>(uniform_int(rng, 0, centers - 1))];
    ck::Embedding e{};
    for (int d = 0; d < dims; ++d) e[static_cast<std::size_t>(d)] = static_cast<float>(base[d] + spread * gauss(rng));
    out.push_back(e);
  }
  return out;
}

inline std::vector<std::vector<double>> as_doubles(const std::vector<ck::Embedding>& pts) {
  std::vector<std::vector<double>> out;
  for (const auto& p : pts) out.emplace_back(p.begin(), p.end());
  return out;
}

// Transcript of consecutive lines covering [0, duration].
inline std::vector<ck::TranscriptLine> random_transcript(std::mt19937& rng, double duration) {
  std::vector<ck::TranscriptLine> lines;
  double t = 0.0;
  int index = 1;
  while (t < duration) {
    const double end = std::min(duration, t + uniform(rng, 2.0, 7.0));
    lines.push_back({index++, ck::ingest::quantize_ms(t), ck::ingest::quantize_ms(end),
                     random_sentence(rng, 3, 9)});
    t = end;
  }
  return lines;
}

}  // namespace testsupport
