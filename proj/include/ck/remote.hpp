#pragma once

// HTTP/JSON clients for optional model backends. Every client throws
// BackendError on transport failure, non-200 status or a malformed body.

#include <optional>
#include <string>

#include "ck/canonical_json.hpp"
#include "ck/classify.hpp"
#include "ck/structure.hpp"

namespace ck::remote {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/'
  int timeout_ms = 10000;

  /// Splits "http://host:port/path". Throws ConfigError when malformed.
  static Endpoint parse(const std::string& url, int timeout_ms = 10000);
  std::string url() const { return origin + path; }
};

/// POSTs `body` as JSON and returns the parsed JSON reply.
Json post_json(const Endpoint& endpoint, const Json& body);

/// Sends [{id, text, context}] and expects [{id, label}] where label is
/// "none" or a display-category slug. Unknown or missing ids come back as
/// nullopt so the caller can fall back per comment.
class RemoteClassifier final : public ClassifierBackend {
 public:
  explicit RemoteClassifier(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<std::optional<KnowledgeLabel>> classify_batch(
      std::span<const ClassifyItem> items) override;
  std::string descriptor() const override { return "remote-classifier " + endpoint_.url(); }

 private:
  Endpoint endpoint_;
};

/// Sends {text} and expects {entities: [{label, salience}], relations: [{s, p, o}]}.
class RemoteExtractor final : public ExtractorBackend {
 public:
  explicit RemoteExtractor(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
  Extraction extract(std::string_view text) override;
  std::string descriptor() const override { return "remote-extractor " + endpoint_.url(); }

 private:
  Endpoint endpoint_;
};

inline constexpr const char* kExplanationPrompt =
    "explain the relationship between this comment and this transcript excerpt";

/// Sends {prompt, comment, excerpt} and expects {explanation: string}.
std::string request_explanation(const Endpoint& endpoint, const std::string& comment,
                                const std::string& excerpt);

}  // namespace ck::remote
