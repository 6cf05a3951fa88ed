#include "ck/remote.hpp"

#include <httplib.h>

#include <unordered_map>

#include "ck/error.hpp"

namespace ck::remote {

Endpoint Endpoint::parse(const std::string& url, int timeout_ms) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0) {
    throw ConfigError("endpoint must be an http:// URL: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  ep.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  ep.timeout_ms = timeout_ms;
  if (ep.origin.size() <= scheme_end + 3) throw ConfigError("endpoint has no host: '" + url + "'");
  return ep;
}

Json post_json(const Endpoint& endpoint, const Json& body) {
  httplib::Client client(endpoint.origin);
  const auto sec = endpoint.timeout_ms / 1000;
  const auto usec = (endpoint.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw BackendError("POST " + endpoint.url() + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("POST " + endpoint.url() + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return Json::parse(res->body);
  } catch (const Json::parse_error& e) {
    throw BackendError("POST " + endpoint.url() + " returned malformed JSON: " + e.what());
  }
}

std::vector<std::optional<KnowledgeLabel>> RemoteClassifier::classify_batch(
    std::span<const ClassifyItem> items) {
  Json req = Json::array();
  for (const auto& item : items) {
    req.push_back(Json{{"id", item.id}, {"text", item.text}, {"context", item.context}});
  }
  const auto reply = post_json(endpoint_, req);
  if (!reply.is_array()) throw BackendError("classifier reply is not a JSON array");
  std::unordered_map<std::string, KnowledgeLabel> by_id;
  for (const auto& entry : reply) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("label") ||
        !entry["id"].is_string() || !entry["label"].is_string()) {
      continue;
    }
    if (auto label = KnowledgeLabel::parse(entry["label"].get<std::string>())) {
      by_id.emplace(entry["id"].get<std::string>(), *label);
    }
  }
  std::vector<std::optional<KnowledgeLabel>> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    auto it = by_id.find(item.id);
    out.push_back(it == by_id.end() ? std::nullopt : std::optional<KnowledgeLabel>(it->second));
  }
  return out;
}

Extraction RemoteExtractor::extract(std::string_view text) {
  const auto reply = post_json(endpoint_, Json{{"text", std::string(text)}});
  Extraction out;
  try {
    for (const auto& e : reply.at("entities")) {
      out.entities.push_back(
          Entity{e.at("label").get<std::string>(), e.value("salience", 1.0), std::string()});
    }
    for (const auto& r : reply.at("relations")) {
      out.relations.push_back(Relation{r.at("s").get<std::string>(), r.at("p").get<std::string>(),
                                       r.at("o").get<std::string>()});
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("extractor reply malformed: ") + e.what());
  }
  return out;
}

std::string request_explanation(const Endpoint& endpoint, const std::string& comment,
                                const std::string& excerpt) {
  const auto reply = post_json(
      endpoint, Json{{"prompt", kExplanationPrompt}, {"comment", comment}, {"excerpt", excerpt}});
  if (!reply.is_object() || !reply.contains("explanation") || !reply["explanation"].is_string()) {
    throw BackendError("explanation reply malformed");
  }
  return reply["explanation"].get<std::string>();
}

}  // namespace ck::remote
