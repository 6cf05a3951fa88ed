#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ck/bundle.hpp"
#include "ck/remote.hpp"

namespace httplib {
class Server;
}

namespace ck {

/// A loaded bundle plus lookup tables built once at load time. Never
/// mutated afterwards, so any number of request threads may share it.
struct VideoEntry {
  std::shared_ptr<const KnowledgeBundle> bundle;
  std::unordered_map<std::string, std::size_t> comment_index;
  std::unordered_map<int, std::size_t> cluster_index;
  std::vector<Embedding> embeddings;  // per comment
  double window_width = 20.0;
  double related_radius = 15.0;
  double tau_rel = 0.35;

  explicit VideoEntry(KnowledgeBundle b);
};

struct ApiResponse {
  int status = 200;
  std::string body;  // canonical JSON
};

using QueryParams = std::multimap<std::string, std::string>;

struct ServeOptions {
  std::optional<remote::Endpoint> explain_endpoint;
  std::filesystem::path static_dir;  // empty: no static mount
};

/// Read-only JSON API over a fixed set of bundles. `handle` is a pure
/// function of (path, query) for the lifetime of the object.
class ApiHandler {
 public:
  explicit ApiHandler(std::vector<KnowledgeBundle> bundles, ServeOptions options = {});

  /// Loads every *.json bundle in `dir`. Throws on the first invalid one.
  static ApiHandler from_directory(const std::filesystem::path& dir, ServeOptions options = {});

  ApiResponse handle(const std::string& path, const QueryParams& query) const;

  const ServeOptions& options() const { return options_; }
  std::size_t video_count() const { return videos_.size(); }

 private:
  ApiResponse list_videos() const;
  ApiResponse video(const VideoEntry& v) const;
  ApiResponse sections(const VideoEntry& v) const;
  ApiResponse transcript(const VideoEntry& v, const QueryParams& q) const;
  ApiResponse wordstream(const VideoEntry& v, const QueryParams& q) const;
  ApiResponse danmaku(const VideoEntry& v, const QueryParams& q) const;
  ApiResponse graph(const VideoEntry& v, const QueryParams& q) const;
  ApiResponse related(const VideoEntry& v, const std::string& did) const;
  ApiResponse explanation(const VideoEntry& v, const std::string& did) const;

  std::map<std::string, std::shared_ptr<const VideoEntry>> videos_;
  ServeOptions options_;
};

/// Deterministic offline explanation text for a comment, built from the
/// entity its cluster attaches to, that entity's relations and the cluster
/// representative.
Json offline_explanation(const VideoEntry& v, const std::string& comment_id);

/// HTTP front end. Routes /api/* to the handler and optionally serves
/// static files.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<const ApiHandler> handler);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  /// Throws Error when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  void listen();
  void stop();

 private:
  std::shared_ptr<const ApiHandler> handler_;
  std::unique_ptr<httplib::Server> server_;
};

/// Splits "host:port". Throws ValidationError.
std::pair<std::string, int> parse_bind_address(const std::string& addr);

}  // namespace ck
