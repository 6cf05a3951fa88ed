#include "ck/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ck/error.hpp"
#include "ck/text.hpp"

namespace ck {

namespace {

ApiResponse json_response(const Json& j, int status = 200) { return {status, canonical_dump(j)}; }

ApiResponse error_response(int status, const std::string& message) {
  return json_response(Json{{"error", message}, {"status", status}}, status);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t b = 0;
  while (b < path.size()) {
    auto e = path.find('/', b);
    if (e == std::string::npos) e = path.size();
    if (e > b) parts.push_back(path.substr(b, e - b));
    b = e + 1;
  }
  return parts;
}

std::optional<std::string> param(const QueryParams& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

std::optional<double> number_param(const QueryParams& q, const std::string& key) {
  auto raw = param(q, key);
  if (!raw) return std::nullopt;
  const auto s = text::trim(*raw);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ValidationError("query parameter '" + key + "' must be a number, got '" + *raw + "'");
  }
  return v;
}

struct Range {
  double from = 0.0;
  double to = 0.0;
};

Range range_param(const QueryParams& q, double duration) {
  Range r{number_param(q, "from").value_or(0.0), number_param(q, "to").value_or(duration)};
  if (r.from < 0.0) throw ValidationError("'from' must be >= 0");
  if (!(r.to > r.from)) throw ValidationError("'to' must be greater than 'from'");
  if (r.to > duration + 1e-9) throw ValidationError("'to' is beyond the video duration");
  return r;
}

CategoryFilter categories_param(const QueryParams& q) {
  auto raw = param(q, "categories");
  return raw ? CategoryFilter::parse(*raw) : CategoryFilter{};
}

Json filter_to_json(const CategoryFilter& f) {
  Json out = Json::array();
  for (auto c : kDisplayCategories) {
    if (f.contains(c)) out.push_back(std::string(slug(c)));
  }
  return out;
}

template <typename T>
T tunable(const Json& tunables, const char* section, const char* key, T fallback) {
  if (tunables.contains(section) && tunables[section].contains(key) &&
      tunables[section][key].is_number()) {
    return tunables[section][key].get<T>();
  }
  return fallback;
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

}  // namespace

VideoEntry::VideoEntry(KnowledgeBundle b) {
  const auto& tun = b.provenance.tunables;
  window_width = tunable(tun, "structure", "window_width", 20.0);
  related_radius = tunable(tun, "semantics", "related_radius", 15.0);
  tau_rel = tunable(tun, "semantics", "tau_rel", 0.35);
  for (std::size_t i = 0; i < b.comments.size(); ++i) {
    comment_index.emplace(b.comments[i].comment.id, i);
    embeddings.push_back(semantics::embed(b.comments[i].comment.text));
  }
  for (std::size_t i = 0; i < b.clusters.size(); ++i) cluster_index.emplace(b.clusters[i].cluster_id, i);
  bundle = std::make_shared<const KnowledgeBundle>(std::move(b));
}

ApiHandler::ApiHandler(std::vector<KnowledgeBundle> bundles, ServeOptions options)
    : options_(std::move(options)) {
  for (auto& b : bundles) {
    auto id = b.meta.video_id;
    if (videos_.count(id)) throw ValidationError("duplicate video id '" + id + "' among bundles");
    videos_.emplace(std::move(id), std::make_shared<const VideoEntry>(std::move(b)));
  }
}

ApiHandler ApiHandler::from_directory(const std::filesystem::path& dir, ServeOptions options) {
  if (!std::filesystem::is_directory(dir)) throw NotFoundError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<KnowledgeBundle> bundles;
  for (const auto& f : files) {
    try {
      bundles.push_back(bundle::load(f));
    } catch (const Error& e) {
      throw ValidationError(f.filename().string() + ": " + e.what());
    }
  }
  return ApiHandler(std::move(bundles), std::move(options));
}

ApiResponse ApiHandler::handle(const std::string& path, const QueryParams& query) const {
  try {
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api" || parts[1] != "videos") {
      return error_response(404, "no such endpoint: " + path);
    }
    if (parts.size() == 2) return list_videos();
    auto it = videos_.find(parts[2]);
    if (it == videos_.end()) return error_response(404, "unknown video '" + parts[2] + "'");
    const auto& v = *it->second;
    if (parts.size() == 3) return video(v);
    if (parts.size() == 4) {
      const auto& sub = parts[3];
      if (sub == "sections") return sections(v);
      if (sub == "transcript") return transcript(v, query);
      if (sub == "wordstream") return wordstream(v, query);
      if (sub == "danmaku") return danmaku(v, query);
      if (sub == "graph") return graph(v, query);
    }
    if (parts.size() == 6 && parts[3] == "danmaku") {
      if (parts[5] == "related") return related(v, parts[4]);
      if (parts[5] == "explanation") return explanation(v, parts[4]);
    }
    return error_response(404, "no such endpoint: " + path);
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const BackendError& e) {
    return error_response(502, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

ApiResponse ApiHandler::list_videos() const {
  Json out = Json::array();
  for (const auto& [id, v] : videos_) {
    out.push_back(
        Json{{"video_id", id}, {"title", v->bundle->meta.title}, {"duration", v->bundle->meta.duration}});
  }
  return json_response(out);
}

ApiResponse ApiHandler::video(const VideoEntry& v) const {
  const auto& b = *v.bundle;
  Json legend = Json::array();
  for (auto c : kDisplayCategories) {
    legend.push_back(Json{{"slug", std::string(slug(c))}, {"name", std::string(display_name(c))}});
  }
  auto meta = bundle::meta_to_json(b.meta);
  meta["duration"] = b.meta.duration;
  return json_response(Json{{"meta", meta},
                            {"legend", legend},
                            {"section_count", b.sections.size()},
                            {"window_count", b.windows.size()},
                            {"window_width", v.window_width},
                            {"comment_count", b.provenance.comment_count},
                            {"knowledge_count", b.provenance.knowledge_count},
                            {"cluster_count", b.provenance.cluster_count},
                            {"provenance", bundle::to_json(b).at("provenance")}});
}

ApiResponse ApiHandler::sections(const VideoEntry& v) const {
  Json out = Json::array();
  for (const auto& s : v.bundle->sections) out.push_back(bundle::section_to_json(s));
  return json_response(out);
}

ApiResponse ApiHandler::transcript(const VideoEntry& v, const QueryParams& q) const {
  const auto r = range_param(q, v.bundle->meta.duration);
  Json lines = Json::array();
  for (const auto& l : v.bundle->transcript) {
    if (l.start < r.to && l.end > r.from) lines.push_back(bundle::line_to_json(l));
  }
  return json_response(Json{{"from_ms", ingest::to_ms(r.from)},
                            {"to_ms", ingest::to_ms(r.to)},
                            {"lines", lines}});
}

ApiResponse ApiHandler::wordstream(const VideoEntry& v, const QueryParams& q) const {
  const auto& b = *v.bundle;
  const auto r = range_param(q, b.meta.duration);
  const auto filter = categories_param(q);
  std::vector<DanmakuCluster> visible;
  for (const auto& c : b.clusters) {
    if (filter.contains(c.category)) visible.push_back(c);
  }
  std::unordered_map<std::string, std::string> keyword_of;
  for (const auto& c : b.comments) {
    if (!c.keyword.empty()) keyword_of.emplace(c.comment.id, c.keyword);
  }
  const auto buckets =
      presentation::bucketize(visible, b.windows, keyword_of, {r.from, r.to}, b.wordstream.bucket_width);
  const auto& tun = b.provenance.tunables;
  presentation::LayoutOptions lo;
  lo.keywords_per_bucket = tunable(tun, "presentation", "keywords_per_bucket", 3);
  lo.font_min = tunable(tun, "presentation", "font_min", 10.0);
  lo.font_max = tunable(tun, "presentation", "font_max", 28.0);
  const auto layout = presentation::layout_wordstream(buckets, b.wordstream.layout.width,
                                                      b.wordstream.layout.height, filter, lo);
  return json_response(Json{{"from_ms", ingest::to_ms(r.from)},
                            {"to_ms", ingest::to_ms(r.to)},
                            {"categories", filter_to_json(filter)},
                            {"bucket_width_ms", ingest::to_ms(b.wordstream.bucket_width)},
                            {"buckets", bundle::buckets_to_json(buckets)},
                            {"layout", bundle::layout_to_json(layout)}});
}

ApiResponse ApiHandler::danmaku(const VideoEntry& v, const QueryParams& q) const {
  const auto& b = *v.bundle;
  const auto r = range_param(q, b.meta.duration);
  const auto filter = categories_param(q);
  std::vector<const DanmakuCluster*> picked;
  for (const auto& c : b.clusters) {
    const double mid = b.windows[static_cast<std::size_t>(c.window_id)].midpoint();
    if (filter.contains(c.category) && mid >= r.from && mid < r.to) picked.push_back(&c);
  }
  auto rep_of = [&](const DanmakuCluster* c) -> const BundleComment& {
    return b.comments[v.comment_index.at(c->representative_id)];
  };
  std::stable_sort(picked.begin(), picked.end(), [&](const auto* x, const auto* y) {
    const auto tx = ingest::to_ms(rep_of(x).comment.t);
    const auto ty = ingest::to_ms(rep_of(y).comment.t);
    if (tx != ty) return tx < ty;
    return x->cluster_id < y->cluster_id;
  });
  Json items = Json::array();
  for (const auto* c : picked) {
    const auto& rep = rep_of(c);
    const auto spec =
        presentation::scroll_spec(std::max<std::size_t>(1, text::codepoint_length(rep.comment.text)),
                                  c->size());
    items.push_back(Json{{"cluster_id", c->cluster_id},
                         {"category", std::string(slug(c->category))},
                         {"window_id", c->window_id},
                         {"size", c->size()},
                         {"member_ids", c->member_ids},
                         {"representative", bundle::comment_to_json(rep)},
                         {"scroll",
                          {{"duration", spec.duration},
                           {"font_scale", spec.font_scale},
                           {"badge", spec.badge},
                           {"badge_count", spec.badge_count}}}});
  }
  return json_response(Json{{"from_ms", ingest::to_ms(r.from)},
                            {"to_ms", ingest::to_ms(r.to)},
                            {"categories", filter_to_json(filter)},
                            {"items", items}});
}

ApiResponse ApiHandler::graph(const VideoEntry& v, const QueryParams& q) const {
  const auto& b = *v.bundle;
  const auto t = number_param(q, "t");
  if (!t) throw ValidationError("query parameter 't' is required");
  if (*t < 0.0) throw ValidationError("'t' must be >= 0");
  if (*t > b.meta.duration) throw ValidationError("'t' is beyond the video duration");
  const auto w = structure::window_index_at(*t, v.window_width, b.windows.size());
  const auto& g = b.graphs[static_cast<std::size_t>(w)];
  Json clusters = Json::array();
  for (const auto& d : g.danmaku) {
    const auto& cl = b.clusters[v.cluster_index.at(d.cluster_id)];
    const auto& rep = b.comments[v.comment_index.at(cl.representative_id)].comment;
    clusters.push_back(Json{{"cluster_id", cl.cluster_id},
                            {"category", std::string(slug(cl.category))},
                            {"size", cl.size()},
                            {"representative_id", rep.id},
                            {"representative_text", rep.text}});
  }
  return json_response(Json{{"window", bundle::window_to_json(b.windows[static_cast<std::size_t>(w)])},
                            {"graph", bundle::graph_to_json(g)},
                            {"clusters", clusters}});
}

namespace {

const BundleComment& find_comment(const VideoEntry& v, const std::string& did) {
  auto it = v.comment_index.find(did);
  if (it == v.comment_index.end()) throw NotFoundError("unknown danmaku '" + did + "'");
  return v.bundle->comments[it->second];
}

// Window a comment belongs to: its cluster's window, else the one holding t.
int window_of(const VideoEntry& v, const BundleComment& c) {
  if (c.cluster_id) return v.bundle->clusters[v.cluster_index.at(*c.cluster_id)].window_id;
  return structure::window_index_at(c.comment.t, v.window_width, v.bundle->windows.size());
}

std::optional<std::string> entity_of(const VideoEntry& v, const BundleComment& c) {
  if (!c.cluster_id) return std::nullopt;
  const auto& g = v.bundle->graphs[static_cast<std::size_t>(window_of(v, c))];
  auto label = g.attached_label(*c.cluster_id);
  if (label.empty()) return std::nullopt;
  return label;
}

}  // namespace

ApiResponse ApiHandler::related(const VideoEntry& v, const std::string& did) const {
  const auto& b = *v.bundle;
  const auto& target = find_comment(v, did);
  std::vector<semantics::RelatedCandidate> pool;
  for (std::size_t i = 0; i < b.comments.size(); ++i) {
    const auto& c = b.comments[i];
    if (!c.label.is_knowledge() && c.comment.id != did) continue;
    pool.push_back(semantics::RelatedCandidate{c.comment.id, c.comment.t, v.embeddings[i], entity_of(v, c)});
  }
  const auto hits = semantics::related_danmaku(did, pool, v.related_radius, v.tau_rel);
  Json out = Json::array();
  for (const auto& h : hits) {
    out.push_back(Json{{"comment", bundle::comment_to_json(find_comment(v, h.id))},
                       {"cosine", h.cosine},
                       {"dt_ms", ingest::to_ms(h.dt)}});
  }
  return json_response(Json{{"target", bundle::comment_to_json(target)}, {"related", out}});
}

Json offline_explanation(const VideoEntry& v, const std::string& comment_id) {
  const auto& b = *v.bundle;
  const auto& c = find_comment(v, comment_id);
  const auto w = window_of(v, c);
  const auto& window = b.windows[static_cast<std::size_t>(w)];
  const auto& g = b.graphs[static_cast<std::size_t>(w)];

  std::string entity(KnowledgeGraph::kHubLabel);
  std::string entity_id(KnowledgeGraph::kHubId);
  if (auto label = entity_of(v, c)) {
    entity = *label;
    for (const auto& e : g.entities) {
      if (e.label == entity) entity_id = e.id;
    }
  }
  std::map<std::string, std::string> label_of;
  for (const auto& e : g.entities) label_of[e.id] = e.label;
  Json relations = Json::array();
  std::string relation_text;
  for (const auto& r : g.relations) {
    if (r.subject != entity_id && r.object != entity_id) continue;
    const auto line = label_of[r.subject] + " " + r.predicate + " " + label_of[r.object];
    relations.push_back(line);
    relation_text += (relation_text.empty() ? "" : "; ") + line;
  }
  std::string representative = c.comment.text;
  if (c.cluster_id) {
    const auto& cl = b.clusters[v.cluster_index.at(*c.cluster_id)];
    representative = find_comment(v, cl.representative_id).comment.text;
  }
  const auto explanation = "Comment \"" + c.comment.text + "\" concerns \"" + entity +
                           "\" in the transcript between " + seconds_text(window.start) + " s and " +
                           seconds_text(window.end) + " s. Related statements: " +
                           (relation_text.empty() ? std::string("none") : relation_text) +
                           ". Representative comment: \"" + representative + "\".";
  return Json{{"comment_id", c.comment.id},
              {"entity", entity},
              {"relations", relations},
              {"representative", representative},
              {"window_id", w},
              {"explanation", explanation},
              {"offline-stub", true}};
}

ApiResponse ApiHandler::explanation(const VideoEntry& v, const std::string& did) const {
  if (!options_.explain_endpoint) return json_response(offline_explanation(v, did));
  const auto& c = find_comment(v, did);
  const auto& window = v.bundle->windows[static_cast<std::size_t>(window_of(v, c))];
  const auto text = remote::request_explanation(*options_.explain_endpoint, c.comment.text, window.text);
  return json_response(Json{{"comment_id", c.comment.id},
                            {"window_id", window.index},
                            {"explanation", text},
                            {"offline-stub", false}});
}

HttpServer::HttpServer(std::shared_ptr<const ApiHandler> handler)
    : handler_(std::move(handler)), server_(std::make_unique<httplib::Server>()) {
  auto h = handler_;
  server_->Get(R"(/api(/.*)?)", [h](const httplib::Request& req, httplib::Response& res) {
    QueryParams q(req.params.begin(), req.params.end());
    const auto r = h->handle(req.path, q);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  if (!handler_->options().static_dir.empty()) {
    if (!server_->set_mount_point("/", handler_->options().static_dir.string())) {
      throw NotFoundError("static directory not found: " + handler_->options().static_dir.string());
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
  }
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

std::pair<std::string, int> parse_bind_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw ValidationError("address must be host:port, got '" + addr + "'");
  }
  const auto port_text = addr.substr(colon + 1);
  char* end = nullptr;
  const long port = std::strtol(port_text.c_str(), &end, 10);
  if (port_text.empty() || *end != '\0' || port < 0 || port > 65535) {
    throw ValidationError("invalid port in '" + addr + "'");
  }
  return {addr.substr(0, colon), static_cast<int>(port)};
}

}  // namespace ck
