#include "ck/bundle.hpp"

#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ck/error.hpp"

namespace ck::bundle {

namespace {

using ingest::from_ms;
using ingest::to_ms;

std::string category_string(DisplayCategory c) { return std::string(slug(c)); }

DisplayCategory category_of(const Json& j, const std::string& where) {
  const auto s = j.get<std::string>();
  auto c = category_from_slug(s);
  if (!c) throw ValidationError(where + ": unknown category '" + s + "'");
  return *c;
}

Json slug_keyed_counts(const std::array<std::int64_t, 7>& counts) {
  Json out = Json::object();
  for (auto c : kDisplayCategories) out[category_string(c)] = counts[legend_index(c)];
  return out;
}

}  // namespace

Json meta_to_json(const VideoMeta& m) {
  return Json{{"video_id", m.video_id},
              {"title", m.title},
              {"duration_ms", to_ms(m.duration)},
              {"domain_tag", m.domain_tag}};
}

Json comment_to_json(const BundleComment& b) {
  const auto& c = b.comment;
  Json j{{"id", c.id},
         {"video_id", c.video_id},
         {"t_ms", to_ms(c.t)},
         {"text", c.text},
         {"mode", c.display_mode},
         {"color", c.color},
         {"user", c.user_hash},
         {"category", b.label.to_string()},
         {"keyword", b.keyword}};
  j["posted_at"] = c.posted_at ? Json(*c.posted_at) : Json(nullptr);
  j["cluster_id"] = b.cluster_id ? Json(*b.cluster_id) : Json(nullptr);
  return j;
}

BundleComment comment_from_json(const Json& j) {
  BundleComment b;
  auto& c = b.comment;
  c.id = j.at("id").get<std::string>();
  c.video_id = j.at("video_id").get<std::string>();
  c.t = from_ms(j.at("t_ms").get<std::int64_t>());
  c.text = j.at("text").get<std::string>();
  c.display_mode = j.at("mode").get<int>();
  c.color = j.at("color").get<std::uint32_t>();
  c.user_hash = j.at("user").get<std::string>();
  if (!j.at("posted_at").is_null()) c.posted_at = j["posted_at"].get<std::int64_t>();
  const auto label = j.at("category").get<std::string>();
  auto parsed = KnowledgeLabel::parse(label);
  if (!parsed) throw ValidationError("comment " + c.id + ": unknown category '" + label + "'");
  b.label = *parsed;
  if (!j.at("cluster_id").is_null()) b.cluster_id = j["cluster_id"].get<int>();
  b.keyword = j.at("keyword").get<std::string>();
  return b;
}

Json line_to_json(const TranscriptLine& l) {
  return Json{{"index", l.index}, {"start_ms", to_ms(l.start)}, {"end_ms", to_ms(l.end)},
              {"text", l.text}};
}

Json section_to_json(const VideoSection& s) {
  return Json{{"index", s.index},
              {"start_ms", to_ms(s.start)},
              {"end_ms", to_ms(s.end)},
              {"summary", s.summary},
              {"first_line", s.first_line},
              {"last_line", s.last_line}};
}

Json window_to_json(const KgWindow& w) {
  return Json{{"index", w.index}, {"start_ms", to_ms(w.start)}, {"end_ms", to_ms(w.end)},
              {"text", w.text}};
}

Json cluster_to_json(const DanmakuCluster& c) {
  return Json{{"cluster_id", c.cluster_id},
              {"category", category_string(c.category)},
              {"member_ids", c.member_ids},
              {"representative_id", c.representative_id},
              {"window_id", c.window_id}};
}

Json graph_to_json(const KnowledgeGraph& g) {
  Json entities = Json::array();
  for (const auto& e : g.entities) {
    entities.push_back(Json{{"id", e.id}, {"label", e.label}, {"salience", e.salience}});
  }
  Json relations = Json::array();
  for (const auto& r : g.relations) {
    relations.push_back(Json{{"subject", r.subject}, {"predicate", r.predicate}, {"object", r.object}});
  }
  Json danmaku = Json::array();
  for (const auto& d : g.danmaku) {
    danmaku.push_back(
        Json{{"id", d.id}, {"cluster_id", d.cluster_id}, {"category", category_string(d.category)}});
  }
  Json attachments = Json::array();
  for (const auto& a : g.attachments) {
    attachments.push_back(Json{{"from", a.from}, {"to", a.to}, {"score", a.score}});
  }
  return Json{{"window_id", g.window_id},
              {"hub", {{"id", KnowledgeGraph::kHubId}, {"label", KnowledgeGraph::kHubLabel}}},
              {"entities", entities},
              {"relations", relations},
              {"danmaku", danmaku},
              {"attachments", attachments}};
}

Json buckets_to_json(std::span<const StreamBucket> buckets) {
  Json out = Json::array();
  for (const auto& b : buckets) {
    Json keywords = Json::object();
    for (auto c : kDisplayCategories) {
      Json list = Json::array();
      for (const auto& [tok, w] : b.keywords[legend_index(c)]) list.push_back(Json::array({tok, w}));
      keywords[category_string(c)] = list;
    }
    out.push_back(Json{{"t_start_ms", to_ms(b.t_start)},
                       {"width_ms", to_ms(b.width)},
                       {"counts", slug_keyed_counts(b.counts)},
                       {"keywords", keywords}});
  }
  return out;
}

Json layout_to_json(const WordstreamLayout& layout) {
  Json bands = Json::array();
  for (const auto& band : layout.bands) {
    Json points = Json::array();
    for (const auto& p : band.points) points.push_back(Json::array({p.x, p.y0, p.y1}));
    bands.push_back(Json{{"category", category_string(band.category)}, {"points", points}});
  }
  Json keywords = Json::array();
  for (const auto& k : layout.keywords) {
    keywords.push_back(Json{{"token", k.token},
                            {"category", category_string(k.category)},
                            {"weight", k.weight},
                            {"x", k.x},
                            {"y", k.y},
                            {"width", k.width},
                            {"height", k.height},
                            {"font_size", k.font_size}});
  }
  return Json{{"width", layout.width},   {"height", layout.height},     {"t0", layout.t0},
              {"t1", layout.t1},         {"x_scale", layout.x_scale},   {"x_offset", layout.x_offset},
              {"bands", bands},          {"keywords", keywords}};
}

Json to_json(const KnowledgeBundle& b) {
  Json transcript = Json::array();
  for (const auto& l : b.transcript) transcript.push_back(line_to_json(l));
  Json sections = Json::array();
  for (const auto& s : b.sections) sections.push_back(section_to_json(s));
  Json windows = Json::array();
  for (const auto& w : b.windows) windows.push_back(window_to_json(w));
  Json comments = Json::array();
  for (const auto& c : b.comments) comments.push_back(comment_to_json(c));
  Json assignments = Json::array();
  for (const auto& a : b.assignments) {
    assignments.push_back(Json{{"comment_id", a.comment_id},
                               {"window_id", a.window_id},
                               {"score", a.score},
                               {"delay_ms", to_ms(a.delay)}});
  }
  Json clusters = Json::array();
  for (const auto& c : b.clusters) clusters.push_back(cluster_to_json(c));
  Json graphs = Json::array();
  for (const auto& g : b.graphs) graphs.push_back(graph_to_json(g));

  const auto& p = b.provenance;
  Json provenance{{"pipeline_version", p.pipeline_version},
                  {"classifier", p.classifier},
                  {"extractor", p.extractor},
                  {"lexicon", p.lexicon},
                  {"tunables", p.tunables},
                  {"input_hash", p.input_hash},
                  {"counts",
                   {{"comments", p.comment_count},
                    {"knowledge", p.knowledge_count},
                    {"clusters", p.cluster_count},
                    {"classifier_fallbacks", p.classifier_fallbacks},
                    {"extractor_fallbacks", p.extractor_fallbacks},
                    {"skipped_elements", p.skipped_elements},
                    {"dropped_comments", p.dropped_comments}}},
                  {"warnings", p.warnings}};

  return Json{{"schema_version", kBundleSchemaVersion},
              {"meta", meta_to_json(b.meta)},
              {"transcript", transcript},
              {"sections", sections},
              {"windows", windows},
              {"comments", comments},
              {"assignments", assignments},
              {"clusters", clusters},
              {"graphs", graphs},
              {"wordstream",
               {{"bucket_width_ms", to_ms(b.wordstream.bucket_width)},
                {"buckets", buckets_to_json(b.wordstream.buckets)},
                {"layout", layout_to_json(b.wordstream.layout)}}},
              {"provenance", provenance}};
}

namespace {

StreamBucket bucket_from_json(const Json& j) {
  StreamBucket b;
  b.t_start = from_ms(j.at("t_start_ms").get<std::int64_t>());
  b.width = from_ms(j.at("width_ms").get<std::int64_t>());
  for (auto c : kDisplayCategories) {
    const auto key = category_string(c);
    b.counts[legend_index(c)] = j.at("counts").at(key).get<std::int64_t>();
    for (const auto& kw : j.at("keywords").at(key)) {
      b.keywords[legend_index(c)].emplace_back(kw.at(0).get<std::string>(),
                                               kw.at(1).get<std::int64_t>());
    }
  }
  return b;
}

WordstreamLayout layout_from_json(const Json& j) {
  WordstreamLayout l;
  l.width = j.at("width").get<double>();
  l.height = j.at("height").get<double>();
  l.t0 = j.at("t0").get<double>();
  l.t1 = j.at("t1").get<double>();
  l.x_scale = j.at("x_scale").get<double>();
  l.x_offset = j.at("x_offset").get<double>();
  for (const auto& bj : j.at("bands")) {
    Band band;
    band.category = category_of(bj.at("category"), "wordstream band");
    for (const auto& p : bj.at("points")) {
      band.points.push_back(
          BandPoint{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    }
    l.bands.push_back(std::move(band));
  }
  for (const auto& kj : j.at("keywords")) {
    KeywordBox k;
    k.token = kj.at("token").get<std::string>();
    k.category = category_of(kj.at("category"), "wordstream keyword");
    k.weight = kj.at("weight").get<std::int64_t>();
    k.x = kj.at("x").get<double>();
    k.y = kj.at("y").get<double>();
    k.width = kj.at("width").get<double>();
    k.height = kj.at("height").get<double>();
    k.font_size = kj.at("font_size").get<double>();
    l.keywords.push_back(std::move(k));
  }
  return l;
}

KnowledgeGraph graph_from_json(const Json& j) {
  KnowledgeGraph g;
  g.window_id = j.at("window_id").get<int>();
  for (const auto& e : j.at("entities")) {
    g.entities.push_back(EntityNode{e.at("id").get<std::string>(), e.at("label").get<std::string>(),
                                    e.at("salience").get<double>()});
  }
  for (const auto& r : j.at("relations")) {
    g.relations.push_back(RelationEdge{r.at("subject").get<std::string>(),
                                       r.at("predicate").get<std::string>(),
                                       r.at("object").get<std::string>()});
  }
  for (const auto& d : j.at("danmaku")) {
    g.danmaku.push_back(DanmakuNode{d.at("id").get<std::string>(), d.at("cluster_id").get<int>(),
                                    category_of(d.at("category"), "graph danmaku node")});
  }
  for (const auto& a : j.at("attachments")) {
    g.attachments.push_back(AttachmentEdge{a.at("from").get<std::string>(),
                                           a.at("to").get<std::string>(),
                                           a.at("score").get<double>()});
  }
  return g;
}

KnowledgeBundle decode(const Json& j) {
  KnowledgeBundle b;
  const auto version = j.at("schema_version").get<int>();
  if (version != kBundleSchemaVersion) {
    throw ValidationError("bundle: unsupported schema_version " + std::to_string(version));
  }
  const auto& m = j.at("meta");
  b.meta.video_id = m.at("video_id").get<std::string>();
  b.meta.title = m.at("title").get<std::string>();
  b.meta.duration = from_ms(m.at("duration_ms").get<std::int64_t>());
  b.meta.domain_tag = m.at("domain_tag").get<std::string>();

  for (const auto& l : j.at("transcript")) {
    b.transcript.push_back(TranscriptLine{l.at("index").get<int>(),
                                          from_ms(l.at("start_ms").get<std::int64_t>()),
                                          from_ms(l.at("end_ms").get<std::int64_t>()),
                                          l.at("text").get<std::string>()});
  }
  for (const auto& s : j.at("sections")) {
    b.sections.push_back(VideoSection{s.at("index").get<int>(),
                                      from_ms(s.at("start_ms").get<std::int64_t>()),
                                      from_ms(s.at("end_ms").get<std::int64_t>()),
                                      s.at("summary").get<std::string>(),
                                      s.at("first_line").get<int>(), s.at("last_line").get<int>()});
  }
  for (const auto& w : j.at("windows")) {
    b.windows.push_back(KgWindow{w.at("index").get<int>(),
                                 from_ms(w.at("start_ms").get<std::int64_t>()),
                                 from_ms(w.at("end_ms").get<std::int64_t>()),
                                 w.at("text").get<std::string>()});
  }
  for (const auto& c : j.at("comments")) b.comments.push_back(comment_from_json(c));
  for (const auto& a : j.at("assignments")) {
    b.assignments.push_back(SegmentAssignment{a.at("comment_id").get<std::string>(),
                                              a.at("window_id").get<int>(),
                                              a.at("score").get<double>(),
                                              from_ms(a.at("delay_ms").get<std::int64_t>())});
  }
  for (const auto& c : j.at("clusters")) {
    DanmakuCluster cl;
    cl.cluster_id = c.at("cluster_id").get<int>();
    cl.category = category_of(c.at("category"), "cluster " + std::to_string(cl.cluster_id));
    cl.member_ids = c.at("member_ids").get<std::vector<std::string>>();
    cl.representative_id = c.at("representative_id").get<std::string>();
    cl.window_id = c.at("window_id").get<int>();
    b.clusters.push_back(std::move(cl));
  }
  for (const auto& g : j.at("graphs")) b.graphs.push_back(graph_from_json(g));

  const auto& ws = j.at("wordstream");
  b.wordstream.bucket_width = from_ms(ws.at("bucket_width_ms").get<std::int64_t>());
  for (const auto& bj : ws.at("buckets")) b.wordstream.buckets.push_back(bucket_from_json(bj));
  b.wordstream.layout = layout_from_json(ws.at("layout"));

  const auto& p = j.at("provenance");
  auto& pv = b.provenance;
  pv.pipeline_version = p.at("pipeline_version").get<std::string>();
  pv.classifier = p.at("classifier").get<std::string>();
  pv.extractor = p.at("extractor").get<std::string>();
  pv.lexicon = p.at("lexicon").get<std::string>();
  pv.tunables = p.at("tunables");
  pv.input_hash = p.at("input_hash").get<std::string>();
  const auto& counts = p.at("counts");
  pv.comment_count = counts.at("comments").get<std::size_t>();
  pv.knowledge_count = counts.at("knowledge").get<std::size_t>();
  pv.cluster_count = counts.at("clusters").get<std::size_t>();
  pv.classifier_fallbacks = counts.at("classifier_fallbacks").get<std::size_t>();
  pv.extractor_fallbacks = counts.at("extractor_fallbacks").get<std::size_t>();
  pv.skipped_elements = counts.at("skipped_elements").get<std::size_t>();
  pv.dropped_comments = counts.at("dropped_comments").get<std::size_t>();
  pv.warnings = p.at("warnings").get<std::vector<std::string>>();
  return b;
}

void fail(const std::string& msg) { throw ValidationError("bundle: " + msg); }

template <typename Span>
void check_tiling(const Span& items, double duration, const std::string& what) {
  if (items.empty()) fail(what + " are empty");
  if (to_ms(items.front().start) != 0) fail(what + " do not start at 0");
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].index != static_cast<int>(i)) {
      fail(what + " index " + std::to_string(items[i].index) + " at position " + std::to_string(i));
    }
    if (to_ms(items[i].end) <= to_ms(items[i].start)) {
      fail(what + " " + std::to_string(i) + " has end <= start");
    }
    if (i + 1 < items.size() && to_ms(items[i].end) != to_ms(items[i + 1].start)) {
      fail(what + " " + std::to_string(i) + " and " + std::to_string(i + 1) + " do not abut");
    }
  }
  if (to_ms(items.back().end) != to_ms(duration)) fail(what + " do not end at the duration");
}

}  // namespace

void validate(const KnowledgeBundle& b) {
  if (b.meta.video_id.empty()) fail("meta.video_id is empty");
  if (!(b.meta.duration > 0.0)) fail("meta.duration must be > 0");
  for (std::size_t i = 0; i < b.transcript.size(); ++i) {
    if (b.transcript[i].index != static_cast<int>(i)) fail("transcript line index out of order");
  }
  check_tiling(b.sections, b.meta.duration, "sections");
  for (const auto& s : b.sections) {
    if (s.first_line < 0 || s.last_line >= static_cast<int>(b.transcript.size()) ||
        (s.first_line > s.last_line && !b.transcript.empty())) {
      fail("section " + std::to_string(s.index) + " has an invalid line range");
    }
  }
  check_tiling(b.windows, b.meta.duration, "windows");

  std::unordered_map<std::string, const BundleComment*> comment_by_id;
  for (const auto& c : b.comments) {
    if (!comment_by_id.emplace(c.comment.id, &c).second) fail("duplicate comment id " + c.comment.id);
  }
  std::map<int, const DanmakuCluster*> cluster_by_id;
  for (const auto& cl : b.clusters) {
    if (!cluster_by_id.emplace(cl.cluster_id, &cl).second) {
      fail("duplicate cluster id " + std::to_string(cl.cluster_id));
    }
    if (cl.window_id < 0 || cl.window_id >= static_cast<int>(b.windows.size())) {
      fail("cluster " + std::to_string(cl.cluster_id) + " references missing window " +
           std::to_string(cl.window_id));
    }
    if (cl.member_ids.empty()) fail("cluster " + std::to_string(cl.cluster_id) + " has no members");
    bool rep_found = false;
    for (const auto& id : cl.member_ids) {
      auto it = comment_by_id.find(id);
      if (it == comment_by_id.end()) {
        fail("cluster " + std::to_string(cl.cluster_id) + " references missing comment " + id);
      }
      const auto* c = it->second;
      if (!c->cluster_id || *c->cluster_id != cl.cluster_id) {
        fail("comment " + id + " is a member of cluster " + std::to_string(cl.cluster_id) +
             " but points elsewhere");
      }
      if (c->label.category() != cl.category) {
        fail("comment " + id + " category differs from cluster " + std::to_string(cl.cluster_id));
      }
      rep_found = rep_found || id == cl.representative_id;
    }
    if (!rep_found) {
      fail("cluster " + std::to_string(cl.cluster_id) + " representative " + cl.representative_id +
           " is not a member");
    }
  }
  for (const auto& c : b.comments) {
    if (c.cluster_id) {
      if (!c.label.is_knowledge()) fail("non-knowledge comment " + c.comment.id + " has a cluster");
      if (!cluster_by_id.count(*c.cluster_id)) {
        fail("comment " + c.comment.id + " references missing cluster " +
             std::to_string(*c.cluster_id));
      }
    } else if (c.label.is_knowledge()) {
      fail("knowledge comment " + c.comment.id + " has no cluster");
    }
  }
  for (const auto& a : b.assignments) {
    if (!comment_by_id.count(a.comment_id)) fail("assignment references missing comment " + a.comment_id);
    if (a.window_id < 0 || a.window_id >= static_cast<int>(b.windows.size())) {
      fail("assignment of " + a.comment_id + " references missing window " +
           std::to_string(a.window_id));
    }
  }

  if (b.graphs.size() != b.windows.size()) fail("graph count differs from window count");
  std::map<int, int> graph_of_cluster;
  for (std::size_t w = 0; w < b.graphs.size(); ++w) {
    const auto& g = b.graphs[w];
    const auto gname = "graph " + std::to_string(g.window_id);
    if (g.window_id != static_cast<int>(w)) fail(gname + " is out of window order");
    std::set<std::string> entity_ids;
    for (const auto& e : g.entities) {
      if (e.id == KnowledgeGraph::kHubId || !entity_ids.insert(e.id).second) {
        fail(gname + " has a duplicate entity id " + e.id);
      }
    }
    for (const auto& r : g.relations) {
      if (!entity_ids.count(r.subject) || !entity_ids.count(r.object)) {
        fail(gname + " relation " + r.subject + " -> " + r.object + " references a missing entity");
      }
    }
    std::set<std::string> node_ids;
    for (const auto& d : g.danmaku) {
      node_ids.insert(d.id);
      auto it = cluster_by_id.find(d.cluster_id);
      if (it == cluster_by_id.end()) {
        fail(gname + " references missing cluster " + std::to_string(d.cluster_id));
      }
      if (it->second->window_id != g.window_id) {
        fail("cluster " + std::to_string(d.cluster_id) + " belongs to window " +
             std::to_string(it->second->window_id) + " but appears in " + gname);
      }
      if (!graph_of_cluster.emplace(d.cluster_id, g.window_id).second) {
        fail("cluster " + std::to_string(d.cluster_id) + " appears in more than one graph node");
      }
    }
    for (const auto& a : g.attachments) {
      if (!node_ids.count(a.from)) fail(gname + " attachment from missing node " + a.from);
      if (a.to != KnowledgeGraph::kHubId && !entity_ids.count(a.to)) {
        fail(gname + " attachment to missing entity " + a.to);
      }
    }
  }
  for (const auto& [id, cl] : cluster_by_id) {
    if (!graph_of_cluster.count(id)) fail("cluster " + std::to_string(id) + " appears in no graph");
  }

  const auto& p = b.provenance;
  if (p.pipeline_version.empty() || p.classifier.empty() || p.extractor.empty() ||
      p.input_hash.empty() || !p.tunables.is_object() || p.tunables.empty()) {
    fail("provenance is incomplete");
  }
}

KnowledgeBundle from_json(const Json& j) {
  KnowledgeBundle b;
  try {
    b = decode(j);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bundle: schema violation: ") + e.what());
  }
  validate(b);
  return b;
}

std::string serialize(const KnowledgeBundle& b) { return canonical_dump(to_json(b)); }

KnowledgeBundle parse(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("bundle: malformed JSON: ") + e.what(), e.byte);
  }
  return from_json(j);
}

void save(const KnowledgeBundle& b, const std::filesystem::path& path) {
  const auto bytes = serialize(b);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.put('\n');
  if (!out) throw Error("failed writing " + path.string());
}

KnowledgeBundle load(const std::filesystem::path& path) { return parse(ingest::read_file(path)); }

}  // namespace ck::bundle
