#pragma once

// API requests whose responses against the fixture bundle are pinned in
// tests/golden/<name>.json.

#include <string>
#include <vector>

#include "ck/server.hpp"

namespace testsupport {

struct GoldenRequest {
  std::string name;
  std::string path;
  ck::QueryParams query;
  int status = 200;
};

inline const std::string kFixtureVideo = "BV1fx411c7Nf";
inline const std::string kFixtureComment = "900273";

inline std::vector<GoldenRequest> golden_requests() {
  const std::string v = "/api/videos/" + kFixtureVideo;
  return {
      {"videos", "/api/videos", {}},
      {"video", v, {}},
      {"sections", v + "/sections", {}},
      {"transcript_0_30", v + "/transcript", {{"from", "0"}, {"to", "30"}}},
      {"wordstream", v + "/wordstream", {}},
      {"wordstream_zoom", v + "/wordstream",
       {{"from", "60"}, {"to", "180"}, {"categories", "inquiry,concept-noting"}}},
      {"danmaku", v + "/danmaku", {}},
      {"danmaku_inquiry_10_40", v + "/danmaku",
       {{"from", "10"}, {"to", "40"}, {"categories", "inquiry"}}},
      {"graph_t37", v + "/graph", {{"t", "37"}}},
      {"related", v + "/danmaku/" + kFixtureComment + "/related", {}},
      {"explanation", v + "/danmaku/" + kFixtureComment + "/explanation", {}},
      {"error_unknown_video", "/api/videos/nope", {}, 404},
      {"error_unknown_category", v + "/danmaku", {{"categories", "bogus"}}, 400},
      {"error_graph_without_t", v + "/graph", {}, 400},
      {"error_bad_range", v + "/transcript", {{"from", "50"}, {"to", "10"}}, 400},
      {"error_unknown_danmaku", v + "/danmaku/nope/related", {}, 404},
  };
}

}  // namespace testsupport
