#pragma once

#include <filesystem>
#include <memory>

#include "ck/bundle.hpp"
#include "ck/config.hpp"
#include "ck/ingest.hpp"

namespace ck {

/// Classifier and extractor picked from the configuration. Owns the
/// lexicon when a custom one is configured.
struct Backends {
  std::shared_ptr<const Lexicon> lexicon;
  std::unique_ptr<ClassifierBackend> classifier;
  std::unique_ptr<ExtractorBackend> extractor;
};

Backends make_backends(const PipelineConfig& config);

/// ingest -> classify -> windows/sections -> map -> cluster -> keywords ->
/// graphs -> wordstream. Validates the config before any work. Stage
/// failures surface as PipelineError naming the stage. The result is in
/// canonical form: saving and reloading it yields an equal bundle.
KnowledgeBundle run_pipeline(const ingest::Corpus& corpus, const PipelineConfig& config);

/// Same with caller-supplied backends.
KnowledgeBundle run_pipeline(const ingest::Corpus& corpus, const PipelineConfig& config,
                             Backends& backends);

}  // namespace ck
