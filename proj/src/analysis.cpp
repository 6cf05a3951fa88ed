#include "ck/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ck/error.hpp"
#include "ck/text.hpp"

namespace ck::analysis {

int entity_coverage(std::span<const std::string> entities, std::span<const std::string> texts,
                    const AliasMap& aliases) {
  std::vector<std::string> normalized;
  normalized.reserve(texts.size());
  for (const auto& t : texts) normalized.push_back(text::normalize(t));
  auto mentioned = [&](const std::string& form) {
    const auto needle = text::normalize(form);
    if (needle.empty()) return false;
    return std::any_of(normalized.begin(), normalized.end(),
                       [&](const std::string& t) { return t.find(needle) != std::string::npos; });
  };
  int covered = 0;
  for (const auto& e : entities) {
    bool hit = mentioned(e);
    if (!hit) {
      auto it = aliases.find(e);
      if (it != aliases.end()) hit = std::any_of(it->second.begin(), it->second.end(), mentioned);
    }
    covered += hit ? 1 : 0;
  }
  return covered;
}

double exact_signed_rank_p(std::span<const double> ranks, double w_observed) {
  std::vector<long long> doubled;
  long long total = 0;
  for (double r : ranks) {
    doubled.push_back(std::llround(2.0 * r));
    total += doubled.back();
  }
  const long long w2 = std::llround(2.0 * w_observed);
  if (2 * w2 >= total) return 1.0;
  // dist[s] = number of sign assignments with doubled W+ equal to s
  std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  long long reach = 0;
  for (auto r : doubled) {
    for (long long s = reach; s >= 0; --s) {
      if (dist[static_cast<std::size_t>(s)] != 0.0) {
        dist[static_cast<std::size_t>(s + r)] += dist[static_cast<std::size_t>(s)];
      }
    }
    reach += r;
  }
  double count = 0.0;
  for (long long s = 0; s <= total; ++s) {
    if (s <= w2 || s >= total - w2) count += dist[static_cast<std::size_t>(s)];
  }
  const double p = count / std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, p);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) throw ValidationError("wilcoxon: need at least one pair");
  std::vector<double> diffs;
  for (const auto& [a, b] : pairs) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("wilcoxon: non-finite value");
    const double d = a - b;
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw DegenerateInputError("wilcoxon: all differences are zero");

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(diffs[i]) < std::abs(diffs[j]); });
  std::vector<double> ranks(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  WilcoxonResult r;
  r.n_effective = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
  r.w = std::min(r.w_plus, r.w_minus);

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double sd = std::sqrt(var);
  const double diff = r.w_plus - mean;
  const double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
  r.z_uncorrected = sd > 0 ? diff / sd : 0.0;
  r.z = sd > 0 ? sign * std::max(0.0, std::abs(diff) - 0.5) / sd : 0.0;
  r.p_normal = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  r.rank_biserial = (r.w_plus - r.w_minus) / (r.w_plus + r.w_minus);

  if (r.n_effective <= kExactCutoff) {
    r.method = WilcoxonMethod::Exact;
    r.p_two_sided = exact_signed_rank_p(ranks, r.w);
    r.effect_size = r.rank_biserial;
  } else {
    r.method = WilcoxonMethod::NormalApprox;
    r.p_two_sided = r.p_normal;
    r.effect_size = std::abs(r.z) / std::sqrt(nn);
  }
  return r;
}

CoverageStudy coverage_study(std::span<const StudyCorpus> corpora) {
  if (corpora.size() < 2) {
    throw ValidationError("coverage study needs at least 2 corpora, got " +
                          std::to_string(corpora.size()));
  }
  CoverageStudy study;
  if (corpora.size() < 5) {
    study.notes.push_back("warning: only " + std::to_string(corpora.size()) +
                          " corpora; at least 5 are recommended");
  }
  std::vector<std::pair<double, double>> rates;
  for (const auto& c : corpora) {
    if (c.entities.empty()) {
      throw ValidationError("coverage study: corpus '" + c.video_id + "' has no entities");
    }
    CoveragePair p;
    p.video_id = c.video_id;
    p.entity_count = static_cast<int>(c.entities.size());
    p.covered_by_danmaku = entity_coverage(c.entities, c.danmaku, c.aliases);
    p.covered_by_comments = entity_coverage(c.entities, c.comments, c.aliases);
    p.danmaku_rate = static_cast<double>(p.covered_by_danmaku) / p.entity_count;
    p.comment_rate = static_cast<double>(p.covered_by_comments) / p.entity_count;
    rates.emplace_back(p.danmaku_rate, p.comment_rate);
    study.pairs.push_back(std::move(p));
  }
  study.notes.push_back("zero differences are excluded before ranking");
  try {
    study.test = wilcoxon_signed_rank(rates);
    if (study.test->w_plus > study.test->w_minus) {
      study.direction = "danmaku higher";
    } else if (study.test->w_plus < study.test->w_minus) {
      study.direction = "comments higher";
    } else {
      study.direction = "no difference";
    }
  } catch (const DegenerateInputError& e) {
    study.direction = "no difference";
    study.notes.push_back(std::string("degenerate input: ") + e.what() + "; test undefined");
  }
  return study;
}

std::string CoverageStudy::to_text() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %8s %10s %10s %10s %10s\n", "video", "entities",
                "danmaku", "comments", "rate_dm", "rate_cm");
  out += buf;
  out += std::string(69, '-') + "\n";
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%-16s %8d %10d %10d %10.3f %10.3f\n", p.video_id.c_str(),
                  p.entity_count, p.covered_by_danmaku, p.covered_by_comments, p.danmaku_rate,
                  p.comment_rate);
    out += buf;
  }
  out += std::string(69, '-') + "\n";
  if (test) {
    const auto& t = *test;
    std::snprintf(buf, sizeof buf,
                  "Wilcoxon signed-rank (%s): n=%d W=%.1f W+=%.1f W-=%.1f\n"
                  "  Z=%.2f (continuity-corrected)  Z=%.2f (uncorrected)\n"
                  "  p=%.3f (%s, %.6f)  p_normal=%.3f\n"
                  "  effect size=%.3f  rank-biserial=%.3f  |Z_uncorrected|/sqrt(n)=%.3f\n",
                  t.method == WilcoxonMethod::Exact ? "exact" : "normal approximation",
                  t.n_effective, t.w, t.w_plus, t.w_minus, t.z, t.z_uncorrected, t.p_two_sided,
                  t.method == WilcoxonMethod::Exact ? "exact" : "normal", t.p_two_sided,
                  t.p_normal, t.effect_size, t.rank_biserial,
                  std::abs(t.z_uncorrected) / std::sqrt(static_cast<double>(t.n_effective)));
    out += buf;
  }
  out += "direction: " + direction + "\n";
  for (const auto& n : notes) out += "note: " + n + "\n";
  return out;
}

Json CoverageStudy::to_json() const {
  Json rows = Json::array();
  for (const auto& p : pairs) {
    rows.push_back(Json{{"video_id", p.video_id},
                        {"entity_count", p.entity_count},
                        {"covered_by_danmaku", p.covered_by_danmaku},
                        {"covered_by_comments", p.covered_by_comments},
                        {"danmaku_rate", p.danmaku_rate},
                        {"comment_rate", p.comment_rate}});
  }
  Json out{{"pairs", rows}, {"direction", direction}, {"notes", notes}};
  if (test) {
    const auto& t = *test;
    out["test"] = Json{{"method", t.method == WilcoxonMethod::Exact ? "exact" : "normal-approx"},
                       {"n_effective", t.n_effective},
                       {"W", t.w},
                       {"W_plus", t.w_plus},
                       {"W_minus", t.w_minus},
                       {"Z", t.z},
                       {"Z_uncorrected", t.z_uncorrected},
                       {"p_two_sided", t.p_two_sided},
                       {"p_normal", t.p_normal},
                       {"effect_size", t.effect_size},
                       {"rank_biserial", t.rank_biserial}};
  } else {
    out["test"] = nullptr;
  }
  return out;
}

std::vector<StudyCorpus> parse_study(const Json& doc) {
  if (!doc.is_object() || !doc.contains("corpora") || !doc["corpora"].is_array()) {
    throw ValidationError("study: expected {\"corpora\": [...]}");
  }
  std::vector<StudyCorpus> out;
  try {
    for (const auto& c : doc["corpora"]) {
      StudyCorpus s;
      s.video_id = c.value("video_id", std::string("video-") + std::to_string(out.size()));
      s.entities = c.at("entities").get<std::vector<std::string>>();
      s.danmaku = c.at("danmaku").get<std::vector<std::string>>();
      s.comments = c.at("comments").get<std::vector<std::string>>();
      if (c.contains("aliases")) s.aliases = c["aliases"].get<AliasMap>();
      out.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("study: ") + e.what());
  }
  return out;
}

}  // namespace ck::analysis
