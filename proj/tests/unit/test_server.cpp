#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "ck/error.hpp"
#include "ck/server.hpp"
#include "fake_backend.hpp"
#include "golden_requests.hpp"
#include "support.hpp"

using namespace ck;
using testsupport::kFixtureComment;
using testsupport::kFixtureVideo;

namespace {

const ApiHandler& fixture_api() {
  static const ApiHandler api({testsupport::fixture_bundle()});
  return api;
}

Json get_json(const std::string& path, const QueryParams& q = {}, int status = 200) {
  const auto r = fixture_api().handle(path, q);
  EXPECT_EQ(r.status, status) << path << " -> " << r.body;
  return Json::parse(r.body);
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string with_query(const std::string& path, const QueryParams& q) {
  std::string out = path;
  char sep = '?';
  for (const auto& [k, v] : q) {
    out += sep + k + "=" + httplib::detail::encode_query_param(v);
    sep = '&';
  }
  return out;
}

}  // namespace

TEST(Api, GoldenResponses) {
  const bool update = std::getenv("CK_UPDATE_GOLDEN") != nullptr;
  for (const auto& req : testsupport::golden_requests()) {
    const auto r = fixture_api().handle(req.path, req.query);
    EXPECT_EQ(r.status, req.status) << req.name;
    const auto file = testsupport::golden_dir() / (req.name + ".json");
    if (update) {
      std::filesystem::create_directories(file.parent_path());
      std::ofstream(file, std::ios::binary) << r.body << '\n';
      continue;
    }
    ASSERT_TRUE(std::filesystem::exists(file)) << file;
    EXPECT_EQ(r.body + "\n", read(file)) << req.name;
  }
}

TEST(Api, VideoList) {
  const auto j = get_json("/api/videos");
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["video_id"], kFixtureVideo);
  EXPECT_EQ(j[0]["duration"], testsupport::fixture_bundle().meta.duration);
  EXPECT_FALSE(j[0]["title"].get<std::string>().empty());
}

TEST(Api, VideoSummary) {
  const auto& b = testsupport::fixture_bundle();
  const auto j = get_json("/api/videos/" + kFixtureVideo);
  EXPECT_EQ(j["section_count"], b.sections.size());
  EXPECT_EQ(j["cluster_count"], b.clusters.size());
  EXPECT_EQ(j["legend"].size(), 7u);
}

TEST(Api, GraphWindowArithmetic) {
  const auto j = get_json("/api/videos/" + kFixtureVideo + "/graph", {{"t", "37"}});
  EXPECT_EQ(j["graph"]["window_id"], 1);
  EXPECT_EQ(j["window"]["start_ms"], 20000);
  EXPECT_EQ(j["window"]["end_ms"], 40000);
  const auto end = get_json("/api/videos/" + kFixtureVideo + "/graph", {{"t", "626"}});
  EXPECT_EQ(end["graph"]["window_id"], testsupport::fixture_bundle().windows.size() - 1);
  get_json("/api/videos/" + kFixtureVideo + "/graph", {{"t", "-1"}}, 400);
  get_json("/api/videos/" + kFixtureVideo + "/graph", {{"t", "abc"}}, 400);
  get_json("/api/videos/" + kFixtureVideo + "/graph", {{"t", "9999"}}, 400);
}

TEST(Api, DanmakuFilterContract) {
  const auto& b = testsupport::fixture_bundle();
  const auto j = get_json("/api/videos/" + kFixtureVideo + "/danmaku",
                          {{"from", "10"}, {"to", "40"}, {"categories", "inquiry"}});
  std::size_t expected = 0;
  for (const auto& c : b.clusters) {
    const double mid = b.windows[static_cast<std::size_t>(c.window_id)].midpoint();
    expected += c.category == DisplayCategory::Inquiry && mid >= 10 && mid < 40;
  }
  EXPECT_EQ(j["items"].size(), expected);
  EXPECT_GT(expected, 0u);
  for (const auto& item : j["items"]) {
    EXPECT_EQ(item["category"], "inquiry");
    const auto& w = b.windows[item["window_id"].get<std::size_t>()];
    EXPECT_GE(w.midpoint(), 10.0);
    EXPECT_LT(w.midpoint(), 40.0);
    const auto size = item["size"].get<std::size_t>();
    EXPECT_EQ(item["member_ids"].size(), size);
    EXPECT_EQ(item["scroll"]["badge"], size >= 2);
  }
}

TEST(Api, WordstreamFilterKeepsCategories) {
  const auto j = get_json("/api/videos/" + kFixtureVideo + "/wordstream",
                          {{"from", "60"}, {"to", "180"}, {"categories", "inquiry,concept-noting"}});
  EXPECT_EQ(j["buckets"].size(), 8u);
  for (const auto& band : j["layout"]["bands"]) {
    const auto cat = band["category"].get<std::string>();
    EXPECT_TRUE(cat == "inquiry" || cat == "concept-noting") << cat;
  }
}

TEST(Api, TranscriptRange) {
  const auto j = get_json("/api/videos/" + kFixtureVideo + "/transcript", {{"from", "0"}, {"to", "30"}});
  ASSERT_FALSE(j["lines"].empty());
  for (const auto& l : j["lines"]) {
    EXPECT_LT(l["start_ms"].get<int>(), 30000);
    EXPECT_GT(l["end_ms"].get<int>(), 0);
  }
}

TEST(Api, RelatedAndOfflineExplanation) {
  const auto base = "/api/videos/" + kFixtureVideo + "/danmaku/" + kFixtureComment;
  const auto r = get_json(base + "/related");
  EXPECT_EQ(r["target"]["id"], kFixtureComment);
  for (const auto& h : r["related"]) {
    EXPECT_LE(h["dt_ms"].get<int>(), 15000);
    EXPECT_NE(h["comment"]["id"], kFixtureComment);
  }
  const auto e = get_json(base + "/explanation");
  EXPECT_EQ(e["offline-stub"], true);
  EXPECT_FALSE(e["explanation"].get<std::string>().empty());
  EXPECT_EQ(e, get_json(base + "/explanation"));
}

TEST(Api, ExplanationProxiesBackend) {
  std::string seen;
  testsupport::FakeBackend fake([&](const std::string& body) {
    seen = body;
    return std::pair<int, std::string>{200, R"({"explanation":"the comment restates the legume trade"})"};
  });
  ServeOptions opts;
  opts.explain_endpoint = remote::Endpoint::parse(fake.url("/explain"), 2000);
  ApiHandler api({testsupport::fixture_bundle()}, opts);
  const auto r = api.handle("/api/videos/" + kFixtureVideo + "/danmaku/" + kFixtureComment + "/explanation", {});
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = Json::parse(r.body);
  EXPECT_EQ(j["offline-stub"], false);
  EXPECT_EQ(j["explanation"], "the comment restates the legume trade");
  EXPECT_EQ(Json::parse(seen)["prompt"], remote::kExplanationPrompt);
}

TEST(Api, ExplanationBackendFailureIs502) {
  ServeOptions opts;
  opts.explain_endpoint = remote::Endpoint::parse("http://127.0.0.1:1/explain", 300);
  ApiHandler api({testsupport::fixture_bundle()}, opts);
  EXPECT_EQ(api.handle("/api/videos/" + kFixtureVideo + "/danmaku/" + kFixtureComment + "/explanation", {}).status,
            502);
}

TEST(Api, ErrorsCarryStatusAndMessage) {
  const auto j = get_json("/api/videos/" + kFixtureVideo + "/danmaku", {{"categories", "bogus"}}, 400);
  EXPECT_NE(j["error"].get<std::string>().find("bogus"), std::string::npos);
  get_json("/api/elsewhere", {}, 404);
  get_json("/api/videos/" + kFixtureVideo + "/wordstream", {{"from", "0"}, {"to", "99999"}}, 400);
}

TEST(Api, ResponsesArePure) {
  for (const auto& req : testsupport::golden_requests())
    EXPECT_EQ(fixture_api().handle(req.path, req.query).body, fixture_api().handle(req.path, req.query).body);
}

TEST(Api, FromDirectoryLoadsBundles) {
  const auto dir = std::filesystem::temp_directory_path() / "ck_server_dir";
  std::filesystem::create_directories(dir);
  bundle::save(testsupport::fixture_bundle(), dir / "a.json");
  const auto api = ApiHandler::from_directory(dir);
  EXPECT_EQ(api.video_count(), 1u);
  std::ofstream(dir / "b.json") << "{";
  EXPECT_THROW(ApiHandler::from_directory(dir), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST(Http, ConcurrentClientsSeeIdenticalBytes) {
  auto handler = std::make_shared<const ApiHandler>(std::vector<KnowledgeBundle>{testsupport::fixture_bundle()});
  HttpServer server(handler);
  const int port = server.bind("127.0.0.1", 0);
  std::thread loop([&] { server.listen(); });

  const auto requests = testsupport::golden_requests();
  std::vector<std::string> expected;
  for (const auto& r : requests) expected.push_back(handler->handle(r.path, r.query).body);

  constexpr int kClients = 32;
  std::vector<std::vector<std::string>> got(kClients);
  std::vector<std::vector<int>> status(kClients);
  std::vector<std::thread> clients;
  for (int c = 0; c < kClients; ++c) {
    clients.emplace_back([&, c] {
      httplib::Client cli("127.0.0.1", port);
      cli.set_read_timeout(30, 0);
      for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto& r = requests[(i + static_cast<std::size_t>(c)) % requests.size()];
        auto res = cli.Get(with_query(r.path, r.query));
        got[static_cast<std::size_t>(c)].push_back(res ? res->body : "<no response>");
        status[static_cast<std::size_t>(c)].push_back(res ? res->status : -1);
      }
    });
  }
  for (auto& t : clients) t.join();
  server.stop();
  loop.join();

  for (int c = 0; c < kClients; ++c) {
    for (std::size_t i = 0; i < requests.size(); ++i) {
      const auto k = (i + static_cast<std::size_t>(c)) % requests.size();
      EXPECT_EQ(status[static_cast<std::size_t>(c)][i], requests[k].status);
      EXPECT_EQ(got[static_cast<std::size_t>(c)][i], expected[k]) << requests[k].name;
    }
  }
}

TEST(Http, BindAddressParsing) {
  EXPECT_EQ(parse_bind_address("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_THROW(parse_bind_address("localhost"), ValidationError);
  EXPECT_THROW(parse_bind_address("h:99999"), ValidationError);
}
