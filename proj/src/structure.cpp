#include "ck/structure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ck/error.hpp"
#include "ck/semantics.hpp"
#include "ck/text.hpp"

namespace ck {

std::string KnowledgeGraph::attached_label(int cluster_id) const {
  std::string node_id;
  for (const auto& d : danmaku) {
    if (d.cluster_id == cluster_id) node_id = d.id;
  }
  for (const auto& a : attachments) {
    if (a.from != node_id) continue;
    for (const auto& e : entities) {
      if (e.id == a.to) return e.label;
    }
  }
  return {};
}

namespace structure {

namespace {

constexpr double kTieTolerance = 1e-12;

std::string join_lines(std::span<const TranscriptLine> lines, std::size_t lo, std::size_t hi,
                       const char* sep = " ") {
  std::string out;
  for (std::size_t i = lo; i < hi; ++i) {
    if (!out.empty()) out += sep;
    out += lines[i].text;
  }
  return out;
}

bool is_sentence_end(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == U';' || cp == U'\n' || cp == 0x3002 ||
         cp == 0xFF01 || cp == 0xFF1F || cp == 0xFF1B;
}

std::vector<std::string> sentence_units(std::string_view body) {
  std::vector<std::string> out;
  std::u32string cur;
  for (char32_t cp : text::decode_utf8(body)) {
    if (is_sentence_end(cp)) {
      auto unit = text::trim(text::encode_utf8(cur));
      if (!unit.empty()) out.push_back(std::move(unit));
      cur.clear();
    } else {
      cur.push_back(cp);
    }
  }
  auto unit = text::trim(text::encode_utf8(cur));
  if (!unit.empty()) out.push_back(std::move(unit));
  return out;
}

std::vector<VideoSection> single_section(std::span<const TranscriptLine> lines, double duration) {
  VideoSection s;
  s.start = 0.0;
  s.end = duration;
  s.first_line = 0;
  s.last_line = static_cast<int>(lines.size()) - 1;
  s.summary = summarize_section(lines);
  return {s};
}

}  // namespace

TilingScores tiling_scores(std::span<const TranscriptLine> lines, int block_lines) {
  const std::size_t n = lines.size();
  const auto block = static_cast<std::size_t>(std::max(1, block_lines));
  TilingScores scores;
  scores.similarity.assign(n, 0.0);
  scores.depth.assign(n, 0.0);
  for (std::size_t g = 1; g < n; ++g) {
    const auto left = join_lines(lines, g >= block ? g - block : 0, g);
    const auto right = join_lines(lines, g, std::min(n, g + block));
    scores.similarity[g] = semantics::cosine(semantics::embed(left), semantics::embed(right));
  }
  const auto& sim = scores.similarity;
  for (std::size_t g = 1; g < n; ++g) {
    double lpeak = sim[g];
    for (std::size_t l = g; l-- > 1;) {
      if (sim[l] >= lpeak) {
        lpeak = sim[l];
      } else {
        break;
      }
    }
    double rpeak = sim[g];
    for (std::size_t r = g + 1; r < n; ++r) {
      if (sim[r] >= rpeak) {
        rpeak = sim[r];
      } else {
        break;
      }
    }
    scores.depth[g] = (lpeak - sim[g]) + (rpeak - sim[g]);
  }
  return scores;
}

std::vector<VideoSection> segment_video(std::span<const TranscriptLine> lines, double duration,
                                        const SegmentOptions& options) {
  if (lines.empty()) throw ValidationError("segment_video: empty transcript");
  if (!(duration > 0.0)) throw ValidationError("segment_video: duration must be > 0");
  const std::size_t n = lines.size();
  if (n < 2 || duration < 2.0 * options.min_len || options.max_sections <= 1) {
    return single_section(lines, duration);
  }

  const auto scores = tiling_scores(lines, options.block_lines);
  const auto& depth = scores.depth;
  std::vector<std::size_t> candidates;
  for (std::size_t g = 1; g < n; ++g) {
    const bool left_ok = g == 1 || depth[g] > depth[g - 1];
    const bool right_ok = g + 1 >= n || depth[g] >= depth[g + 1];
    if (depth[g] > 1e-9 && left_ok && right_ok) candidates.push_back(g);
  }
  if (!candidates.empty()) {
    double mean = 0.0;
    for (auto g : candidates) mean += depth[g];
    mean /= static_cast<double>(candidates.size());
    double var = 0.0;
    for (auto g : candidates) var += (depth[g] - mean) * (depth[g] - mean);
    const double cutoff = mean - 0.5 * std::sqrt(var / static_cast<double>(candidates.size()));
    std::erase_if(candidates, [&](std::size_t g) { return depth[g] < cutoff; });
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return depth[a] > depth[b]; });

  std::set<double> cuts{0.0, duration};
  for (auto g : candidates) {
    if (static_cast<int>(cuts.size()) - 1 >= options.max_sections) break;
    const double b = lines[g].start;
    if (b <= 0.0 || b >= duration || cuts.count(b)) continue;
    auto next = cuts.upper_bound(b);
    auto prev = std::prev(next);
    if (b - *prev < options.min_len || *next - b < options.min_len) continue;
    cuts.insert(b);
  }

  std::vector<double> bounds(cuts.begin(), cuts.end());
  std::vector<VideoSection> sections;
  std::size_t line = 0;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    VideoSection s;
    s.index = static_cast<int>(k);
    s.start = bounds[k];
    s.end = bounds[k + 1];
    const bool last = k + 2 == bounds.size();
    const std::size_t first = line;
    while (line < n && (last || lines[line].start < s.end)) ++line;
    s.first_line = static_cast<int>(first);
    s.last_line = static_cast<int>(line) - 1;
    if (line > first) s.summary = summarize_section(lines.subspan(first, line - first));
    sections.push_back(std::move(s));
  }
  return sections;
}

std::string summarize_section(std::span<const TranscriptLine> lines) {
  if (lines.empty()) return {};
  if (lines.size() == 1) return text::truncate(lines[0].text, kMaxSummaryChars);
  std::vector<Embedding> emb;
  emb.reserve(lines.size());
  for (const auto& l : lines) emb.push_back(semantics::embed(l.text));
  std::size_t best = 0;
  double best_score = -2.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (i != j) sum += semantics::cosine(emb[i], emb[j]);
    }
    const double mean = sum / static_cast<double>(lines.size() - 1);
    if (mean > best_score + kTieTolerance) {
      best = i;
      best_score = mean;
    }
  }
  return text::truncate(lines[best].text, kMaxSummaryChars);
}

std::vector<KgWindow> make_windows(double duration, double width,
                                   std::span<const TranscriptLine> lines) {
  if (!(duration > 0.0)) throw ValidationError("make_windows: duration must be > 0");
  if (!(width > 0.0)) throw ValidationError("make_windows: width must be > 0");
  const auto count = static_cast<std::size_t>(std::ceil(duration / width));
  std::vector<KgWindow> windows(std::max<std::size_t>(count, 1));
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto& w = windows[i];
    w.index = static_cast<int>(i);
    w.start = static_cast<double>(i) * width;
    w.end = i + 1 == windows.size() ? duration : static_cast<double>(i + 1) * width;
    for (const auto& l : lines) {
      if (l.start < w.end && l.end > w.start) {
        if (!w.text.empty()) w.text += '\n';
        w.text += l.text;
      }
    }
  }
  return windows;
}

int window_index_at(double t, double width, std::size_t window_count) {
  if (window_count == 0) return 0;
  const auto idx = static_cast<long long>(std::floor(t / width));
  return static_cast<int>(std::clamp<long long>(idx, 0, static_cast<long long>(window_count) - 1));
}

Extraction baseline_extract(std::string_view body, const Lexicon& lexicon,
                            std::size_t max_entities) {
  const auto units = sentence_units(body);
  std::vector<std::vector<text::Token>> unit_tokens;
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // token -> (count, first pos)
  std::map<std::string, std::size_t> source_unit;
  std::size_t pos = 0;
  for (std::size_t u = 0; u < units.size(); ++u) {
    auto toks = text::tokenize(units[u]);
    for (const auto& t : toks) {
      auto [it, inserted] = stats.try_emplace(t.text, 0, pos);
      ++it->second.first;
      if (inserted) source_unit[t.text] = u;
      ++pos;
    }
    unit_tokens.push_back(std::move(toks));
  }

  std::vector<std::string> picked;
  for (const auto& [tok, st] : stats) {
    if (st.first >= 2 && text::codepoint_length(tok) >= 2 && !lexicon.is_stopword(tok)) {
      picked.push_back(tok);
    }
  }
  std::sort(picked.begin(), picked.end(), [&](const auto& a, const auto& b) {
    const auto& sa = stats[a];
    const auto& sb = stats[b];
    if (sa.first != sb.first) return sa.first > sb.first;
    return sa.second < sb.second;
  });
  if (picked.size() > max_entities) picked.resize(max_entities);

  Extraction out;
  const std::set<std::string> entity_set(picked.begin(), picked.end());
  for (const auto& p : picked) {
    out.entities.push_back(
        Entity{p, static_cast<double>(stats[p].first), units[source_unit[p]]});
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& toks : unit_tokens) {
    std::vector<std::pair<std::string, std::size_t>> mentions;  // first mention per entity
    std::set<std::string> present;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (entity_set.count(toks[i].text) && present.insert(toks[i].text).second) {
        mentions.emplace_back(toks[i].text, i);
      }
    }
    for (std::size_t a = 0; a < mentions.size(); ++a) {
      for (std::size_t b = a + 1; b < mentions.size(); ++b) {
        const auto& s = mentions[a].first;
        const auto& o = mentions[b].first;
        const auto key = s < o ? std::make_pair(s, o) : std::make_pair(o, s);
        if (!seen.insert(key).second) continue;
        std::size_t obj_pos = mentions[b].second;
        for (std::size_t i = mentions[a].second + 1; i < toks.size(); ++i) {
          if (toks[i].text == o) {
            obj_pos = i;
            break;
          }
        }
        // whole words up to 12 code points; a lone longer word is cut
        std::string predicate;
        for (std::size_t i = mentions[a].second + 1; i < obj_pos; ++i) {
          const auto next = predicate.empty() ? toks[i].text : predicate + ' ' + toks[i].text;
          if (text::decode_utf8(next).size() <= 12) {
            predicate = next;
            continue;
          }
          if (predicate.empty()) {
            auto cps = text::decode_utf8(next);
            cps.resize(12);
            predicate = text::encode_utf8(cps);
          }
          break;
        }
        out.relations.push_back(Relation{s, predicate.empty() ? "related" : predicate, o});
      }
    }
  }
  return out;
}

KnowledgeGraph assemble_graph(const KgWindow& window, const Extraction& extraction,
                              std::span<const GraphCluster> clusters, double tau_attach) {
  KnowledgeGraph g;
  g.window_id = window.index;
  const auto units = sentence_units(window.text);

  std::map<std::string, std::string> id_of_label;
  std::vector<Embedding> entity_embeddings;
  for (const auto& e : extraction.entities) {
    const auto label = text::trim(e.label);
    if (label.empty() || id_of_label.count(label)) continue;
    const auto id = "e" + std::to_string(g.entities.size());
    id_of_label[label] = id;
    g.entities.push_back(EntityNode{id, label, e.salience});
    std::string source = e.source_line;
    if (source.empty()) {
      for (const auto& u : units) {
        if (text::contains_normalized(u, label)) {
          source = u;
          break;
        }
      }
    }
    entity_embeddings.push_back(semantics::embed(label + " " + source));
  }
  for (const auto& r : extraction.relations) {
    auto s = id_of_label.find(text::trim(r.subject));
    auto o = id_of_label.find(text::trim(r.object));
    if (s == id_of_label.end() || o == id_of_label.end() || s->second == o->second) continue;
    g.relations.push_back(RelationEdge{s->second, r.predicate, o->second});
  }
  for (const auto& c : clusters) {
    DanmakuNode node{"d" + std::to_string(c.cluster_id), c.cluster_id, c.category};
    const auto emb = semantics::embed(c.representative_text);
    std::optional<std::size_t> best_index;
    double best = 0.0;
    for (std::size_t i = 0; i < g.entities.size(); ++i) {
      const double score = semantics::cosine(emb, entity_embeddings[i]);
      if (!best_index || score > best + kTieTolerance) {
        best = score;
        best_index = i;
      }
    }
    const bool anchored = best_index && best >= tau_attach;
    const std::string target =
        anchored ? g.entities[*best_index].id : std::string(KnowledgeGraph::kHubId);
    g.attachments.push_back(AttachmentEdge{node.id, target, best});
    g.danmaku.push_back(std::move(node));
  }
  return g;
}

KnowledgeGraph build_graph(const KgWindow& window, std::span<const GraphCluster> clusters,
                           ExtractorBackend& extractor, double tau_attach) {
  return assemble_graph(window, extractor.extract(window.text), clusters, tau_attach);
}

}  // namespace structure
}  // namespace ck
