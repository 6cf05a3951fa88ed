#include "ck/pipeline.hpp"

#include <map>
#include <unordered_map>

#include "ck/error.hpp"
#include "ck/remote.hpp"
#include "ck/text.hpp"

namespace ck {

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e.what(), e.exit_code());
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what(), 2);
  }
}

// Falls back to the baseline extractor when the configured one fails.
Extraction extract_with_fallback(ExtractorBackend& primary, structure::BaselineExtractor& baseline,
                                 std::string_view text, std::size_t& fallbacks) {
  if (dynamic_cast<structure::BaselineExtractor*>(&primary) != nullptr) {
    return primary.extract(text);
  }
  try {
    return primary.extract(text);
  } catch (const BackendError&) {
    ++fallbacks;
    return baseline.extract(text);
  }
}

}  // namespace

Backends make_backends(const PipelineConfig& config) {
  Backends b;
  if (config.classify.lexicon_path.empty()) {
    b.lexicon = std::shared_ptr<const Lexicon>(&Lexicon::builtin(), [](const Lexicon*) {});
  } else {
    b.lexicon = std::make_shared<const Lexicon>(
        Lexicon::parse(ingest::read_file(config.classify.lexicon_path)));
  }
  if (config.classify.backend == "remote") {
    b.classifier = std::make_unique<remote::RemoteClassifier>(
        remote::Endpoint::parse(config.classify.endpoint, config.classify.timeout_ms));
  } else {
    b.classifier = std::make_unique<LexiconBackend>(*b.lexicon);
  }
  if (config.structure.extractor == "remote") {
    b.extractor = std::make_unique<remote::RemoteExtractor>(
        remote::Endpoint::parse(config.structure.extractor_endpoint, config.classify.timeout_ms));
  } else {
    b.extractor = std::make_unique<structure::BaselineExtractor>(
        static_cast<std::size_t>(config.structure.max_entities));
  }
  return b;
}

KnowledgeBundle run_pipeline(const ingest::Corpus& corpus, const PipelineConfig& config) {
  config.validate();
  auto backends = make_backends(config);
  return run_pipeline(corpus, config, backends);
}

KnowledgeBundle run_pipeline(const ingest::Corpus& corpus, const PipelineConfig& config,
                             Backends& backends) {
  config.validate();
  const Lexicon& lexicon = backends.lexicon ? *backends.lexicon : Lexicon::builtin();
  const double duration = corpus.meta.duration;

  KnowledgeBundle b;
  b.meta = corpus.meta;
  b.transcript = corpus.lines;

  stage("ingest", [&] {
    if (corpus.lines.empty()) throw EmptyInputError("transcript has no lines");
    if (!(duration > 0.0)) throw ValidationError("duration must be > 0");
  });

  const auto classified = stage("classify", [&] {
    ClassifyOptions opts;
    opts.parallelism = config.pipeline.parallelism;
    opts.batch_size = static_cast<std::size_t>(config.pipeline.batch_size);
    opts.context_radius = config.classify.context_radius;
    opts.allow_fallback = config.classify.allow_fallback;
    return classify_corpus(corpus.comments, corpus.lines, *backends.classifier, opts, lexicon);
  });

  stage("segment", [&] {
    b.windows = structure::make_windows(duration, config.structure.window_width, corpus.lines);
    structure::SegmentOptions seg;
    seg.max_sections = config.structure.max_sections;
    seg.min_len = config.structure.min_section_len;
    b.sections = structure::segment_video(corpus.lines, duration, seg);
  });

  // Knowledge comments, in input order, with their embeddings.
  std::vector<std::size_t> knowledge;
  std::vector<Embedding> embeddings;
  for (std::size_t i = 0; i < classified.comments.size(); ++i) {
    if (classified.comments[i].label.is_knowledge()) {
      knowledge.push_back(i);
      embeddings.push_back(semantics::embed(classified.comments[i].comment.text));
    }
  }

  stage("map", [&] {
    std::vector<semantics::WindowProfile> profiles;
    for (const auto& w : b.windows) {
      profiles.push_back(semantics::WindowProfile{w.index, w.start, w.end, semantics::embed(w.text)});
    }
    semantics::MappingParams params;
    params.lambda = config.semantics.lambda;
    params.mu = config.semantics.mu;
    for (std::size_t k = 0; k < knowledge.size(); ++k) {
      const auto& c = classified.comments[knowledge[k]].comment;
      b.assignments.push_back(semantics::map_to_window(c.id, c.t, embeddings[k], profiles, params));
    }
  });

  stage("cluster", [&] {
    std::vector<semantics::PlacedComment> placed;
    for (std::size_t k = 0; k < knowledge.size(); ++k) {
      const auto& cc = classified.comments[knowledge[k]];
      placed.push_back(semantics::PlacedComment{cc.comment.id, cc.comment.t, *cc.label.category(),
                                                b.assignments[k].window_id, embeddings[k]});
    }
    b.clusters = semantics::cluster_danmaku(placed, config.semantics.eps, config.semantics.min_pts);
  });

  std::unordered_map<std::string, std::string> keyword_of;
  std::unordered_map<std::string, int> cluster_of;
  stage("keywords", [&] {
    std::vector<std::string> texts;
    for (auto i : knowledge) texts.push_back(classified.comments[i].comment.text);
    const auto stats = semantics::CorpusStats::build(texts);
    for (auto i : knowledge) {
      const auto& c = classified.comments[i].comment;
      keyword_of[c.id] = semantics::extract_keyword(c.text, stats, lexicon);
    }
    for (const auto& cl : b.clusters) {
      for (const auto& id : cl.member_ids) cluster_of[id] = cl.cluster_id;
    }
    for (const auto& cc : classified.comments) {
      BundleComment bc;
      bc.comment = cc.comment;
      bc.label = cc.label;
      if (auto it = cluster_of.find(cc.comment.id); it != cluster_of.end()) bc.cluster_id = it->second;
      if (auto it = keyword_of.find(cc.comment.id); it != keyword_of.end()) bc.keyword = it->second;
      b.comments.push_back(std::move(bc));
    }
  });

  std::size_t extractor_fallbacks = 0;
  stage("graphs", [&] {
    std::unordered_map<std::string, const std::string*> text_of;
    for (const auto& c : corpus.comments) text_of[c.id] = &c.text;
    std::map<int, std::vector<structure::GraphCluster>> by_window;
    for (const auto& cl : b.clusters) {
      by_window[cl.window_id].push_back(
          structure::GraphCluster{cl.cluster_id, cl.category, *text_of.at(cl.representative_id)});
    }
    structure::BaselineExtractor baseline(static_cast<std::size_t>(config.structure.max_entities));
    for (const auto& w : b.windows) {
      const auto extraction =
          extract_with_fallback(*backends.extractor, baseline, w.text, extractor_fallbacks);
      const auto& clusters = by_window[w.index];
      b.graphs.push_back(
          structure::assemble_graph(w, extraction, clusters, config.structure.tau_attach));
    }
  });

  stage("wordstream", [&] {
    b.wordstream.bucket_width = config.presentation.bucket_width;
    b.wordstream.buckets = presentation::bucketize(b.clusters, b.windows, keyword_of,
                                                   {0.0, duration}, config.presentation.bucket_width);
    presentation::LayoutOptions lo;
    lo.keywords_per_bucket = config.presentation.keywords_per_bucket;
    lo.font_min = config.presentation.font_min;
    lo.font_max = config.presentation.font_max;
    b.wordstream.layout = presentation::layout_wordstream(
        b.wordstream.buckets, config.presentation.width, config.presentation.height, {}, lo);
  });

  auto& p = b.provenance;
  p.classifier = backends.classifier->descriptor();
  p.extractor = backends.extractor->descriptor();
  p.lexicon = lexicon.descriptor();
  p.tunables = config.to_json();
  p.input_hash = text::hex64(corpus.input_hash);
  p.comment_count = b.comments.size();
  p.knowledge_count = knowledge.size();
  p.cluster_count = b.clusters.size();
  p.classifier_fallbacks = classified.fallback_count;
  p.extractor_fallbacks = extractor_fallbacks;
  p.skipped_elements = corpus.skipped_elements;
  p.dropped_comments = corpus.dropped_comments;
  p.warnings = corpus.warnings;

  return stage("bundle", [&] { return bundle::parse(bundle::serialize(b)); });
}

}  // namespace ck
