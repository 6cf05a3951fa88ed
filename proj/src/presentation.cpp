#include "ck/presentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ck/error.hpp"
#include "ck/text.hpp"

namespace ck {

CategoryFilter CategoryFilter::only(std::span<const DisplayCategory> cats) {
  auto f = none();
  for (auto c : cats) f.set(c);
  return f;
}

CategoryFilter CategoryFilter::parse(std::string_view csv) {
  if (text::trim(csv).empty()) return {};
  auto f = none();
  std::size_t b = 0;
  while (b <= csv.size()) {
    auto e = csv.find(',', b);
    if (e == std::string_view::npos) e = csv.size();
    const auto item = text::trim(csv.substr(b, e - b));
    b = e + 1;
    if (item.empty()) continue;
    auto c = category_from_slug(item);
    if (!c) throw ValidationError("unknown category '" + item + "'");
    f.set(*c);
  }
  return f;
}

namespace presentation {

namespace {

// Band edges at an arbitrary x, linear between bucket centers and flat
// beyond the outermost ones.
std::pair<double, double> band_edges_at(const Band& band, double x) {
  const auto& p = band.points;
  if (p.empty()) return {0.0, 0.0};
  if (x <= p.front().x) return {p.front().y0, p.front().y1};
  if (x >= p.back().x) return {p.back().y0, p.back().y1};
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (x >= p[i].x && x <= p[i + 1].x) {
      const double span = p[i + 1].x - p[i].x;
      const double a = span > 0.0 ? (x - p[i].x) / span : 0.0;
      return {p[i].y0 + a * (p[i + 1].y0 - p[i].y0), p[i].y1 + a * (p[i + 1].y1 - p[i].y1)};
    }
  }
  return {p.back().y0, p.back().y1};
}

bool overlaps(const KeywordBox& a, const KeywordBox& b) {
  return a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height &&
         b.y < a.y + a.height;
}

struct Offset {
  int dx;
  int dy;
};

const std::vector<Offset>& placement_offsets() {
  static const std::vector<Offset> offsets = [] {
    std::vector<Offset> out;
    for (int dx = -4; dx <= 4; ++dx) {
      for (int dy = -4; dy <= 4; ++dy) out.push_back({dx, dy});
    }
    std::stable_sort(out.begin(), out.end(), [](Offset a, Offset b) {
      const int ra = a.dx * a.dx + a.dy * a.dy;
      const int rb = b.dx * b.dx + b.dy * b.dy;
      if (ra != rb) return ra < rb;
      if (std::abs(a.dy) != std::abs(b.dy)) return std::abs(a.dy) < std::abs(b.dy);
      if (a.dx != b.dx) return a.dx > b.dx;
      return a.dy > b.dy;
    });
    return out;
  }();
  return offsets;
}

}  // namespace

std::vector<StreamBucket> bucketize(std::span<const DanmakuCluster> clusters,
                                    std::span<const KgWindow> windows,
                                    const std::unordered_map<std::string, std::string>& keyword_of,
                                    BucketRange range, double bucket_width) {
  if (!(range.to > range.from)) throw ValidationError("bucketize: empty zoom range");
  if (range.from < 0.0) throw ValidationError("bucketize: zoom range starts before 0");
  if (!windows.empty() && range.to > windows.back().end + 1e-9) {
    throw ValidationError("bucketize: zoom range ends after the video");
  }
  if (!(bucket_width > 0.0)) throw ValidationError("bucketize: bucket width must be > 0");

  const auto n = static_cast<std::size_t>(std::ceil((range.to - range.from) / bucket_width - 1e-9));
  std::vector<StreamBucket> buckets(std::max<std::size_t>(n, 1));
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    buckets[i].t_start = range.from + static_cast<double>(i) * bucket_width;
    buckets[i].width = std::min(bucket_width, range.to - buckets[i].t_start);
  }
  std::vector<std::array<std::map<std::string, std::int64_t>, 7>> weights(buckets.size());

  for (const auto& c : clusters) {
    if (c.window_id < 0 || static_cast<std::size_t>(c.window_id) >= windows.size()) {
      throw ValidationError("bucketize: cluster " + std::to_string(c.cluster_id) +
                            " references missing window " + std::to_string(c.window_id));
    }
    const double mid = windows[static_cast<std::size_t>(c.window_id)].midpoint();
    if (mid < range.from || mid >= range.to) continue;
    auto idx = static_cast<std::size_t>(std::floor((mid - range.from) / bucket_width));
    idx = std::min(idx, buckets.size() - 1);
    const auto cat = legend_index(c.category);
    buckets[idx].counts[cat] += static_cast<std::int64_t>(c.size());
    for (const auto& id : c.member_ids) {
      auto it = keyword_of.find(id);
      if (it != keyword_of.end() && !it->second.empty()) ++weights[idx][cat][it->second];
    }
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    for (std::size_t cat = 0; cat < 7; ++cat) {
      auto& list = buckets[i].keywords[cat];
      list.assign(weights[i][cat].begin(), weights[i][cat].end());
      std::stable_sort(list.begin(), list.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
    }
  }
  return buckets;
}

double text_box_width(std::string_view token, double font_size) {
  double w = 0.0;
  for (char32_t cp : text::decode_utf8(token)) w += (text::is_cjk(cp) ? 1.0 : 0.6) * font_size;
  return w;
}

WordstreamLayout layout_wordstream(std::span<const StreamBucket> buckets, double width,
                                   double height, const CategoryFilter& filter,
                                   const LayoutOptions& options) {
  if (!(width > 0.0) || !(height > 0.0)) throw ValidationError("layout: W and H must be > 0");
  WordstreamLayout layout;
  layout.width = width;
  layout.height = height;
  if (buckets.empty()) return layout;

  layout.t0 = buckets.front().t_start;
  layout.t1 = buckets.back().t_start + buckets.back().width;
  layout.x_scale = width / (layout.t1 - layout.t0);
  layout.x_offset = -layout.t0 * layout.x_scale;
  auto to_x = [&](double t) { return layout.x_scale * t + layout.x_offset; };

  std::int64_t max_total = 1;
  for (const auto& b : buckets) {
    std::int64_t total = 0;
    for (auto c : kDisplayCategories) {
      if (filter.contains(c)) total += b.counts[legend_index(c)];
    }
    max_total = std::max(max_total, total);
  }
  const double unit = height / static_cast<double>(max_total);

  std::vector<double> stack(buckets.size(), 0.0);
  for (auto c : kDisplayCategories) {
    if (!filter.contains(c)) continue;
    Band band;
    band.category = c;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      const double thickness = static_cast<double>(buckets[i].counts[legend_index(c)]) * unit;
      band.points.push_back(BandPoint{to_x(buckets[i].center()), stack[i], stack[i] + thickness});
      stack[i] += thickness;
    }
    layout.bands.push_back(std::move(band));
  }

  const auto k = static_cast<std::size_t>(std::max(0, options.keywords_per_bucket));
  std::int64_t max_weight = 1;
  for (const auto& b : buckets) {
    for (auto c : kDisplayCategories) {
      if (!filter.contains(c)) continue;
      for (const auto& [tok, w] : b.keywords[legend_index(c)]) max_weight = std::max(max_weight, w);
    }
  }

  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const double cx = to_x(buckets[i].center());
    const double bucket_px = buckets[i].width * layout.x_scale;
    for (const auto& band : layout.bands) {
      auto ranked = buckets[i].keywords[legend_index(band.category)];
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      if (ranked.size() > k) ranked.resize(k);
      for (const auto& [tok, w] : ranked) {
        const double ratio = static_cast<double>(w) / static_cast<double>(max_weight);
        const double font = std::clamp(
            options.font_min + ratio * (options.font_max - options.font_min), options.font_min,
            options.font_max);
        KeywordBox box;
        box.token = tok;
        box.category = band.category;
        box.weight = w;
        box.font_size = font;
        box.width = text_box_width(tok, font);
        box.height = font;
        const auto [mid0, mid1] = band_edges_at(band, cx);
        const double cy = 0.5 * (mid0 + mid1);
        bool placed = false;
        for (const auto& off : placement_offsets()) {
          box.x = cx + off.dx * bucket_px / 8.0 - 0.5 * box.width;
          box.y = cy + off.dy * font / 2.0 - 0.5 * box.height;
          if (box.x < 0.0 || box.x + box.width > width || box.y < 0.0 ||
              box.y + box.height > height) {
            continue;
          }
          bool inside = true;
          for (double x : {box.x, box.x + 0.5 * box.width, box.x + box.width}) {
            const auto [y0, y1] = band_edges_at(band, x);
            if (box.y < y0 || box.y + box.height > y1) {
              inside = false;
              break;
            }
          }
          if (!inside) continue;
          const bool clash = std::any_of(layout.keywords.begin(), layout.keywords.end(),
                                         [&](const KeywordBox& other) { return overlaps(box, other); });
          if (clash) continue;
          placed = true;
          break;
        }
        if (placed) layout.keywords.push_back(box);
      }
    }
  }
  return layout;
}

WordstreamLayout simplify_stream(const WordstreamLayout& layout, double new_height) {
  if (!(new_height > 0.0)) throw ValidationError("simplify_stream: height must be > 0");
  WordstreamLayout out = layout;
  out.keywords.clear();
  const double s = layout.height > 0.0 ? new_height / layout.height : 0.0;
  for (auto& band : out.bands) {
    for (auto& p : band.points) {
      p.y0 *= s;
      p.y1 *= s;
    }
  }
  out.height = new_height;
  return out;
}

ScrollSpec scroll_spec(std::size_t length_chars, std::size_t cluster_size) {
  if (length_chars < 1 || cluster_size < 1) {
    throw ValidationError("scroll_spec: length and cluster size must be >= 1");
  }
  const double L = static_cast<double>(length_chars);
  const double lc = std::log2(static_cast<double>(cluster_size));
  ScrollSpec spec;
  const double length_factor = 1.0 + 0.5 * std::max(0.0, L - 12.0) / 12.0;
  spec.duration = std::clamp(6.0 * length_factor * (1.0 + 0.15 * lc), 4.0, 12.0);
  spec.font_scale = std::clamp(1.0 + 0.2 * lc, 1.0, 1.6);
  spec.badge = cluster_size >= 2;
  spec.badge_count = static_cast<std::int64_t>(cluster_size);
  return spec;
}

}  // namespace presentation
}  // namespace ck
