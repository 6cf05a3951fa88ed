#include <gtest/gtest.h>

#include <random>

#include "ck/error.hpp"
#include "ck/presentation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ck;
using namespace ck::presentation;

namespace {

std::vector<StreamBucket> random_buckets(std::mt19937& rng) {
  const int n = testsupport::uniform_int(rng, 1, 30);
  const double width = testsupport::uniform(rng, 5, 30);
  std::vector<StreamBucket> out(static_cast<std::size_t>(n));
  const auto& vocab = testsupport::vocabulary();
  const double sparsity = testsupport::uniform(rng, 0, 1);
  for (int i = 0; i < n; ++i) {
    auto& b = out[static_cast<std::size_t>(i)];
    b.t_start = i * width;
    b.width = width;
    for (std::size_t c = 0; c < 7; ++c) {
      if (testsupport::uniform(rng, 0, 1) < sparsity) continue;
      b.counts[c] = testsupport::uniform_int(rng, 0, 40);
      std::map<std::string, std::int64_t> kw;
      std::int64_t left = b.counts[c];
      while (left > 0) {
        const auto w = std::min<std::int64_t>(left, testsupport::uniform_int(rng, 1, 6));
        kw[vocab[static_cast<std::size_t>(testsupport::uniform_int(rng, 0, static_cast<int>(vocab.size()) - 1))]] += w;
        left -= w;
      }
      b.keywords[c].assign(kw.begin(), kw.end());
      std::stable_sort(b.keywords[c].begin(), b.keywords[c].end(),
                       [](const auto& x, const auto& y) { return x.second > y.second; });
    }
  }
  return out;
}

CategoryFilter random_filter(std::mt19937& rng) {
  auto f = CategoryFilter::none();
  for (auto c : kDisplayCategories)
    if (testsupport::uniform(rng, 0, 1) < 0.6) f.set(c);
  return f;
}

DanmakuCluster cluster(int id, DisplayCategory cat, int window, std::vector<std::string> members) {
  DanmakuCluster c;
  c.cluster_id = id;
  c.category = cat;
  c.window_id = window;
  c.member_ids = std::move(members);
  c.representative_id = c.member_ids.front();
  return c;
}

}  // namespace

TEST(Bucketize, ClusterCountedOnceWithItsSize) {
  const auto windows = structure::make_windows(60.0);
  const std::vector<DanmakuCluster> clusters = {
      cluster(0, DisplayCategory::Inquiry, 1, {"a", "b", "c", "d", "e"})};
  const std::unordered_map<std::string, std::string> kw = {{"a", "nodule"}, {"b", "nodule"}, {"c", "soil"}};
  const auto b = bucketize(clusters, windows, kw, {0, 60});
  ASSERT_EQ(b.size(), 4u);
  std::int64_t total = 0;
  int nonzero = 0;
  for (const auto& x : b) {
    total += x.counts[legend_index(DisplayCategory::Inquiry)];
    nonzero += x.counts[legend_index(DisplayCategory::Inquiry)] > 0;
  }
  EXPECT_EQ(total, 5);
  EXPECT_EQ(nonzero, 1);
  const auto& bucket = b[2];  // midpoint 30 s
  EXPECT_EQ(bucket.counts[legend_index(DisplayCategory::Inquiry)], 5);
  const auto& words = bucket.keywords[legend_index(DisplayCategory::Inquiry)];
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(words[0], (std::pair<std::string, std::int64_t>{"nodule", 2}));
}

TEST(Bucketize, BucketCountIsCeilOfRange) {
  const auto windows = structure::make_windows(626.0);
  EXPECT_EQ(bucketize({}, windows, {}, {100, 161}).size(), 5u);
  EXPECT_EQ(bucketize({}, windows, {}, {0, 626}).size(), 42u);
  for (const auto& b : bucketize({}, windows, {}, {0, 626}))
    for (auto c : b.counts) EXPECT_EQ(c, 0);
  EXPECT_THROW(bucketize({}, windows, {}, {50, 50}), ValidationError);
}

TEST(Layout, SingleNonzeroBucketFillsHeight) {
  std::vector<StreamBucket> b(3);
  for (int i = 0; i < 3; ++i) {
    b[static_cast<std::size_t>(i)].t_start = 15.0 * i;
    b[static_cast<std::size_t>(i)].width = 15.0;
  }
  b[1].counts = {3, 1, 0, 2, 0, 4, 1};
  const auto l = layout_wordstream(b, 900, 240);
  double sum = 0;
  for (const auto& band : l.bands) sum += band.points[1].y1 - band.points[1].y0;
  EXPECT_NEAR(sum, 240.0, 1e-9);
}

TEST(Layout, FilterKeepsOnlySelectedBand) {
  std::mt19937 rng(4);
  const auto b = random_buckets(rng);
  const DisplayCategory only[] = {DisplayCategory::Inquiry};
  const auto l = layout_wordstream(b, 1200, 240, CategoryFilter::only(only));
  ASSERT_EQ(l.bands.size(), 1u);
  EXPECT_EQ(l.bands[0].category, DisplayCategory::Inquiry);
  double max_top = 0;
  for (const auto& p : l.bands[0].points) max_top = std::max(max_top, p.y1);
  bool any = false;
  for (const auto& x : b) any = any || x.counts[legend_index(DisplayCategory::Inquiry)] > 0;
  if (any) EXPECT_NEAR(max_top, 240.0, 1e-9);
  for (const auto& k : l.keywords) EXPECT_EQ(k.category, DisplayCategory::Inquiry);
}

TEST(Layout, EqualWeightTieGoesAlphabetical) {
  std::vector<StreamBucket> b(1);
  b[0].t_start = 0;
  b[0].width = 15;
  const auto cat = legend_index(DisplayCategory::ConceptNoting);
  b[0].counts[cat] = 6;
  b[0].keywords[cat] = {{"zebra", 3}, {"apple", 3}};
  LayoutOptions opts;
  opts.keywords_per_bucket = 1;
  const auto l = layout_wordstream(b, 600, 240, {}, opts);
  ASSERT_EQ(l.keywords.size(), 1u);
  EXPECT_EQ(l.keywords[0].token, "apple");
}

TEST(Layout, PropertySuite) {
  std::mt19937 rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto buckets = random_buckets(rng);
    const auto filter = random_filter(rng);
    const double W = testsupport::uniform(rng, 200, 2000);
    const double H = testsupport::uniform(rng, 60, 400);
    const auto l = layout_wordstream(buckets, W, H, filter);

    std::int64_t max_total = 1;
    for (const auto& b : buckets) {
      std::int64_t t = 0;
      for (auto c : kDisplayCategories)
        if (filter.contains(c)) t += b.counts[legend_index(c)];
      max_total = std::max(max_total, t);
    }
    std::size_t prev_index = 0;
    for (std::size_t bi = 0; bi < l.bands.size(); ++bi) {
      const auto idx = legend_index(l.bands[bi].category);
      EXPECT_TRUE(filter.contains(l.bands[bi].category));
      if (bi) EXPECT_GT(idx, prev_index);
      prev_index = idx;
    }
    EXPECT_EQ(l.bands.size(), filter.count());
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      std::int64_t total = 0;
      for (auto c : kDisplayCategories)
        if (filter.contains(c)) total += buckets[i].counts[legend_index(c)];
      double sum = 0;
      double below = 0;
      for (const auto& band : l.bands) {
        const auto& p = band.points[i];
        EXPECT_GE(p.y1 - p.y0, 0.0);
        EXPECT_NEAR(p.y0, below, 1e-9);
        below = p.y1;
        sum += p.y1 - p.y0;
      }
      EXPECT_NEAR(sum, static_cast<double>(total) * H / static_cast<double>(max_total), 1e-9);
    }
    for (std::size_t i = 0; i < l.keywords.size(); ++i) {
      const auto& a = l.keywords[i];
      EXPECT_GE(a.x, 0.0);
      EXPECT_GE(a.y, 0.0);
      EXPECT_LE(a.x + a.width, W + 1e-9);
      EXPECT_LE(a.y + a.height, H + 1e-9);
      EXPECT_GE(a.font_size, 10.0);
      EXPECT_LE(a.font_size, 28.0);
      for (std::size_t j = i + 1; j < l.keywords.size(); ++j) {
        const auto& b = l.keywords[j];
        EXPECT_FALSE(oracle::boxes_overlap(a.x, a.y, a.width, a.height, b.x, b.y, b.width, b.height));
      }
    }
    // Filtering changes which bands exist, never which categories survive.
    const auto all = layout_wordstream(buckets, W, H);
    std::set<std::size_t> kept, expected;
    for (const auto& band : l.bands) kept.insert(legend_index(band.category));
    for (const auto& band : all.bands)
      if (filter.contains(band.category)) expected.insert(legend_index(band.category));
    EXPECT_EQ(kept, expected);

    const double h2 = testsupport::uniform(rng, 10, H);
    const auto s = simplify_stream(l, h2);
    EXPECT_TRUE(s.keywords.empty());
    EXPECT_EQ(s.height, h2);
    for (std::size_t bi = 0; bi < l.bands.size(); ++bi) {
      for (std::size_t i = 0; i < l.bands[bi].points.size(); ++i) {
        const double before = l.bands[bi].points[i].y1 - l.bands[bi].points[i].y0;
        const double after = s.bands[bi].points[i].y1 - s.bands[bi].points[i].y0;
        EXPECT_NEAR(after, before * h2 / H, 1e-6);
      }
    }
  }
}

TEST(Layout, EmptyInputs) {
  const auto l = layout_wordstream({}, 100, 50);
  EXPECT_TRUE(l.bands.empty());
  EXPECT_TRUE(simplify_stream(l, 20).bands.empty());
  EXPECT_THROW(layout_wordstream({}, 0, 50), ValidationError);
}

TEST(Scroll, ReferenceValues) {
  const auto base = scroll_spec(12, 1);
  EXPECT_DOUBLE_EQ(base.duration, 6.0);
  EXPECT_DOUBLE_EQ(base.font_scale, 1.0);
  EXPECT_FALSE(base.badge);
  const auto four = scroll_spec(12, 4);
  EXPECT_NEAR(four.duration, 7.8, 1e-12);
  EXPECT_NEAR(four.font_scale, 1.4, 1e-12);
  EXPECT_TRUE(four.badge);
  EXPECT_EQ(four.badge_count, 4);
  const auto big = scroll_spec(200, 64);
  EXPECT_DOUBLE_EQ(big.duration, 12.0);
  EXPECT_DOUBLE_EQ(big.font_scale, 1.6);
  EXPECT_THROW(scroll_spec(0, 1), ValidationError);
}

TEST(Scroll, MonotoneAndClamped) {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto L = static_cast<std::size_t>(testsupport::uniform_int(rng, 1, 400));
    const auto c = static_cast<std::size_t>(testsupport::uniform_int(rng, 1, 200));
    const auto s = scroll_spec(L, c);
    const auto sl = scroll_spec(L + static_cast<std::size_t>(testsupport::uniform_int(rng, 1, 50)), c);
    const auto sc = scroll_spec(L, c + static_cast<std::size_t>(testsupport::uniform_int(rng, 1, 50)));
    EXPECT_GE(s.duration, 4.0);
    EXPECT_LE(s.duration, 12.0);
    EXPECT_GE(s.font_scale, 1.0);
    EXPECT_LE(s.font_scale, 1.6);
    EXPECT_LE(s.duration, sl.duration);
    EXPECT_LE(s.duration, sc.duration);
    EXPECT_LE(s.font_scale, sc.font_scale);
    EXPECT_EQ(s.badge, c >= 2);
  }
}

TEST(Filter, ParseSlugs) {
  EXPECT_EQ(CategoryFilter::parse("").count(), 7u);
  const auto f = CategoryFilter::parse("inquiry, concept-noting");
  EXPECT_EQ(f.count(), 2u);
  EXPECT_TRUE(f.contains(DisplayCategory::Inquiry));
  EXPECT_THROW(CategoryFilter::parse("inquiry,bogus"), ValidationError);
}
