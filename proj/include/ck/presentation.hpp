#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ck/classify.hpp"
#include "ck/semantics.hpp"
#include "ck/structure.hpp"

namespace ck {

/// One time slice of the Wordstream. Indexed by legend position.
struct StreamBucket {
  double t_start = 0.0;
  double width = 0.0;
  std::array<std::int64_t, 7> counts{};
  /// (token, weight) sorted by weight desc, then token.
  std::array<std::vector<std::pair<std::string, std::int64_t>>, 7> keywords;

  double center() const { return t_start + 0.5 * width; }

  bool operator==(const StreamBucket&) const = default;
};

/// Set of visible display categories; default is all seven.
class CategoryFilter {
 public:
  CategoryFilter() { bits_.set(); }
  static CategoryFilter none() {
    CategoryFilter f;
    f.bits_.reset();
    return f;
  }
  static CategoryFilter only(std::span<const DisplayCategory> cats);
  /// Comma list of slugs; empty string means all. Throws ValidationError on
  /// an unknown slug.
  static CategoryFilter parse(std::string_view csv);

  bool contains(DisplayCategory c) const { return bits_.test(legend_index(c)); }
  void set(DisplayCategory c, bool on = true) { bits_.set(legend_index(c), on); }
  std::size_t count() const { return bits_.count(); }
  bool operator==(const CategoryFilter&) const = default;

 private:
  std::bitset<7> bits_;
};

struct BandPoint {
  double x = 0.0;
  double y0 = 0.0;  // lower edge, measured up from the baseline
  double y1 = 0.0;  // upper edge

  bool operator==(const BandPoint&) const = default;
};

struct Band {
  DisplayCategory category = DisplayCategory::InterpretationNeutral;
  std::vector<BandPoint> points;  // one per bucket center

  bool operator==(const Band&) const = default;
};

/// Axis-aligned keyword box; (x, y) is the lower-left corner with y up.
struct KeywordBox {
  std::string token;
  DisplayCategory category = DisplayCategory::InterpretationNeutral;
  std::int64_t weight = 0;
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
  double font_size = 0.0;

  bool operator==(const KeywordBox&) const = default;
};

struct WordstreamLayout {
  double width = 0.0;
  double height = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// x = x_scale * t + x_offset
  double x_scale = 0.0;
  double x_offset = 0.0;
  std::vector<Band> bands;  // legend order
  std::vector<KeywordBox> keywords;

  bool operator==(const WordstreamLayout&) const = default;
};

/// Playback parameters for one scrolling representative.
struct ScrollSpec {
  double duration = 6.0;  // seconds to cross the viewport
  double font_scale = 1.0;
  bool badge = false;
  std::int64_t badge_count = 1;

  bool operator==(const ScrollSpec&) const = default;
};

namespace presentation {

struct BucketRange {
  double from = 0.0;
  double to = 0.0;
};

/// Clusters are counted once, with weight = size, in the bucket holding
/// their window midpoint. Keyword weights count member comments per
/// extracted keyword. Clusters outside [from, to) are ignored.
std::vector<StreamBucket> bucketize(std::span<const DanmakuCluster> clusters,
                                    std::span<const KgWindow> windows,
                                    const std::unordered_map<std::string, std::string>& keyword_of,
                                    BucketRange range, double bucket_width = 15.0);

struct LayoutOptions {
  int keywords_per_bucket = 3;
  double font_min = 10.0;
  double font_max = 28.0;
};

/// Width of a token box: 1.0 * font per CJK character, 0.6 * font otherwise.
double text_box_width(std::string_view token, double font_size);

/// Stacked-from-zero bands scaled so the tallest filtered bucket reaches H,
/// with up to k keywords per bucket and category placed center-outward.
WordstreamLayout layout_wordstream(std::span<const StreamBucket> buckets, double width,
                                   double height, const CategoryFilter& filter = {},
                                   const LayoutOptions& options = {});

/// Drops the keyword boxes and rescales the bands to `new_height`.
WordstreamLayout simplify_stream(const WordstreamLayout& layout, double new_height);

/// Crossing time grows with text length and cluster size; font scale with
/// cluster size. Both clamped.
ScrollSpec scroll_spec(std::size_t length_chars, std::size_t cluster_size);

}  // namespace presentation
}  // namespace ck
