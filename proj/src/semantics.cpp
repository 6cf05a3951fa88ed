#include "ck/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "ck/error.hpp"
#include "ck/text.hpp"

namespace ck::semantics {

namespace {

constexpr double kTieTolerance = 1e-12;

}  // namespace

Embedding embed(std::string_view input) {
  Embedding v{};
  const auto normalized = text::normalize(input);
  if (normalized.empty()) return v;
  const auto cps = text::decode_utf8(" " + normalized + " ");
  std::array<double, kEmbeddingDim> tf{};
  for (std::size_t n = 2; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      const auto gram = text::encode_utf8(std::u32string_view(cps).substr(i, n));
      tf[text::fnv1a64(gram) % kEmbeddingDim] += 1.0;
    }
  }
  double sq = 0.0;
  for (double x : tf) sq += x * x;
  const double inv = 1.0 / std::sqrt(sq);
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) v[i] = static_cast<float>(tf[i] * inv);
  return v;
}

double norm(const Embedding& v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  return std::sqrt(sq);
}

double cosine(const Embedding& a, const Embedding& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::vector<int> dbscan(std::span<const Embedding> points, double eps, int min_pts) {
  if (!(eps > 0.0)) throw ValidationError("dbscan: eps must be > 0");
  if (min_pts < 1) throw ValidationError("dbscan: min_pts must be >= 1");
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || 1.0 - cosine(points[i], points[j]) <= eps) neighbors[i].push_back(j);
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    core[i] = neighbors[i].size() >= static_cast<std::size_t>(min_pts);
  }

  constexpr int kUnassigned = -2;
  std::vector<int> label(n, kUnassigned);
  int next_id = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnassigned || !core[p]) continue;
    const int id = next_id++;
    label[p] = id;
    std::deque<std::size_t> queue{p};
    while (!queue.empty()) {
      const auto q = queue.front();
      queue.pop_front();
      for (auto r : neighbors[q]) {
        if (label[r] != kUnassigned) continue;
        label[r] = id;
        if (core[r]) queue.push_back(r);
      }
    }
  }
  for (auto& l : label) {
    if (l == kUnassigned) l = kNoise;
  }
  return label;
}

std::size_t medoid(std::span<const PlacedComment> items, std::span<const std::size_t> members) {
  if (members.empty()) throw std::invalid_argument("medoid of an empty member list");
  if (members.size() == 1) return members[0];
  std::size_t best = members[0];
  double best_score = -2.0;
  for (auto i : members) {
    double sum = 0.0;
    for (auto j : members) {
      if (i != j) sum += cosine(items[i].embedding, items[j].embedding);
    }
    const double mean = sum / static_cast<double>(members.size() - 1);
    bool better = mean > best_score + kTieTolerance;
    if (!better && std::abs(mean - best_score) <= kTieTolerance) {
      const auto& a = items[i];
      const auto& b = items[best];
      better = a.t < b.t || (a.t == b.t && a.id < b.id);
    }
    if (better) {
      best = i;
      best_score = std::max(mean, best_score);
    }
  }
  return best;
}

std::vector<DanmakuCluster> cluster_danmaku(std::span<const PlacedComment> items, double eps,
                                            int min_pts) {
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < items.size(); ++i) {
    buckets[{items[i].window_id, legend_index(items[i].category)}].push_back(i);
  }
  std::vector<DanmakuCluster> out;
  for (const auto& [key, indices] : buckets) {
    std::vector<Embedding> points;
    points.reserve(indices.size());
    for (auto i : indices) points.push_back(items[i].embedding);
    const auto labels = dbscan(points, eps, min_pts);

    std::vector<std::vector<std::size_t>> groups;
    std::map<int, std::size_t> group_of_label;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (labels[k] == kNoise) {
        groups.push_back({indices[k]});
        continue;
      }
      auto [it, inserted] = group_of_label.try_emplace(labels[k], groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(indices[k]);
    }
    for (const auto& group : groups) {
      DanmakuCluster c;
      c.cluster_id = static_cast<int>(out.size());
      c.category = items[group.front()].category;
      c.window_id = key.first;
      for (auto i : group) c.member_ids.push_back(items[i].id);
      c.representative_id = items[medoid(items, group)].id;
      out.push_back(std::move(c));
    }
  }
  return out;
}

SegmentAssignment map_to_window(std::string_view comment_id, double t, const Embedding& embedding,
                                std::span<const WindowProfile> windows,
                                const MappingParams& params) {
  const WindowProfile* best = nullptr;
  double best_score = 0.0;
  auto contains = [t](const WindowProfile& w) { return w.start <= t && t < w.end; };
  auto distance = [t, &contains](const WindowProfile& w) {
    if (contains(w)) return 0.0;
    return t < w.start ? w.start - t : t - w.end;
  };
  for (const auto& w : windows) {
    if (w.start > t + params.forward_slack || t - w.end > params.max_delay) continue;
    const double delay = std::max(0.0, t - w.end);
    const double score =
        params.lambda * cosine(embedding, w.embedding) - params.mu * delay / params.max_delay;
    bool take = best == nullptr || score > best_score + kTieTolerance;
    if (!take && std::abs(score - best_score) <= kTieTolerance) {
      const double d_new = distance(w);
      const double d_old = distance(*best);
      take = d_new < d_old;
    }
    if (take) {
      best = &w;
      best_score = score;
    }
  }
  if (best == nullptr) {
    throw Error("internal: no candidate window for comment " + std::string(comment_id) +
                " at t=" + std::to_string(t));
  }
  return SegmentAssignment{std::string(comment_id), best->index, best_score,
                           std::max(0.0, t - best->end)};
}

CorpusStats CorpusStats::build(std::span<const std::string> texts) {
  CorpusStats stats;
  stats.documents = texts.size();
  for (const auto& t : texts) {
    std::set<std::string> seen;
    for (auto& tok : text::tokenize(t)) seen.insert(std::move(tok.text));
    for (const auto& tok : seen) ++stats.df[tok];
  }
  return stats;
}

double CorpusStats::idf(const std::string& token) const {
  auto it = df.find(token);
  const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((static_cast<double>(documents) + 1.0) / (d + 1.0)) + 1.0;
}

std::string extract_keyword(std::string_view input, const CorpusStats& stats,
                            const Lexicon& lexicon) {
  const auto tokens = text::tokenize(input);
  if (tokens.empty()) return {};
  std::map<std::string, std::size_t> tf;
  for (const auto& t : tokens) ++tf[t.text];

  const text::Token* best = nullptr;
  double best_score = 0.0;
  for (const auto& t : tokens) {
    if (lexicon.is_stopword(t.text)) continue;
    const double score = static_cast<double>(tf[t.text]) * stats.idf(t.text);
    if (best == nullptr || score > best_score + kTieTolerance) {
      best = &t;
      best_score = score;
    }
  }
  if (best != nullptr) return best->text;

  const text::Token* longest = &tokens.front();
  for (const auto& t : tokens) {
    if (text::codepoint_length(t.text) > text::codepoint_length(longest->text)) longest = &t;
  }
  return longest->text;
}

std::vector<RelatedHit> related_danmaku(std::string_view target_id,
                                        std::span<const RelatedCandidate> pool, double radius,
                                        double tau) {
  auto target = std::find_if(pool.begin(), pool.end(),
                             [&](const auto& c) { return c.id == target_id; });
  if (target == pool.end()) {
    throw NotFoundError("unknown danmaku id '" + std::string(target_id) + "'");
  }
  std::vector<RelatedHit> hits;
  for (const auto& c : pool) {
    if (c.id == target->id) continue;
    const double dt = std::abs(c.t - target->t);
    if (dt > radius) continue;
    const double cos = cosine(target->embedding, c.embedding);
    const bool same_entity = target->entity && c.entity && *target->entity == *c.entity;
    if (same_entity || cos >= tau) hits.push_back(RelatedHit{c.id, cos, dt});
  }
  std::sort(hits.begin(), hits.end(), [](const RelatedHit& a, const RelatedHit& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    if (a.dt != b.dt) return a.dt < b.dt;
    return a.id < b.id;
  });
  return hits;
}

}  // namespace ck::semantics
