#include "ck/metrics.hpp"

#include <cstdio>
#include <map>

#include "ck/error.hpp"

namespace ck::metrics {

double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) throw ValidationError("kappa: label vectors differ in length");
  if (a.empty()) throw ValidationError("kappa: need at least one label");
  const auto n = static_cast<double>(a.size());
  std::map<std::string, double> freq_a;
  std::map<std::string, double> freq_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    freq_a[a[i]] += 1.0;
    freq_b[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  double chance = 0.0;
  for (const auto& [label, count] : freq_a) {
    auto it = freq_b.find(label);
    if (it != freq_b.end()) chance += (count / n) * (it->second / n);
  }
  const double observed = agree / n;
  if (chance >= 1.0) throw DegenerateInputError("kappa undefined: chance agreement is 1");
  return (observed - chance) / (1.0 - chance);
}

void ConfusionMatrix::validate() const {
  const auto k = classes.size();
  if (k < 2) throw ValidationError("confusion matrix needs at least 2 classes");
  if (counts.size() != k) throw ValidationError("confusion matrix row count != class count");
  bool any = false;
  for (const auto& row : counts) {
    if (row.size() != k) throw ValidationError("confusion matrix is not square");
    for (auto v : row) {
      if (v < 0) throw ValidationError("confusion matrix has a negative count");
      any |= v > 0;
    }
  }
  if (!any) throw DegenerateInputError("confusion matrix is all zero");
}

F1Report f1_report(const ConfusionMatrix& m) {
  m.validate();
  const auto k = m.classes.size();
  F1Report report;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::int64_t row = 0;
    std::int64_t col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += m.counts[i][j];
      col += m.counts[j][i];
    }
    const auto tp = static_cast<double>(m.counts[i][i]);
    ClassScore s;
    s.name = m.classes[i];
    s.support = row;
    s.zero_support = row == 0;
    s.precision = col > 0 ? tp / static_cast<double>(col) : 0.0;
    s.recall = row > 0 ? tp / static_cast<double>(row) : 0.0;
    const double denom = 2.0 * tp + static_cast<double>(row - m.counts[i][i]) +
                         static_cast<double>(col - m.counts[i][i]);
    s.f1 = (s.zero_support || denom == 0.0) ? 0.0 : 2.0 * tp / denom;
    sum += s.f1;
    report.classes.push_back(std::move(s));
  }
  report.macro_f1 = sum / static_cast<double>(k);
  return report;
}

DistributionReport distribution_report(std::span<const KnowledgeLabel> labels) {
  DistributionReport r;
  r.total_comments = static_cast<std::int64_t>(labels.size());
  std::map<Theme, std::int64_t> themes;
  std::map<Stance, std::int64_t> stances;
  for (const auto& l : labels) {
    if (!l.is_knowledge()) continue;
    ++r.knowledge_comments;
    ++themes[*l.theme()];
    if (l.stance()) ++stances[*l.stance()];
  }
  if (r.knowledge_comments == 0) {
    r.note = "no knowledge comments; distribution is empty";
    return r;
  }
  const auto pct = [&](std::int64_t c) {
    return 100.0 * static_cast<double>(c) / static_cast<double>(r.knowledge_comments);
  };
  for (auto t : kThemes) {
    const auto c = themes[t];
    r.rows.push_back(DistributionRow{std::string(theme_name(t)), std::string(theme_name(t)), c,
                                     pct(c), false});
    if (t == Theme::Interpretation) {
      for (auto s : {Stance::Positive, Stance::Neutral, Stance::Negative}) {
        const auto sc = stances[s];
        const auto cat = KnowledgeLabel::interpretation(s).category();
        r.rows.push_back(DistributionRow{std::string(stance_name(s)), std::string(slug(*cat)), sc,
                                         pct(sc), true});
      }
    }
  }
  return r;
}

std::string DistributionReport::to_text() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28s %8s %10s\n", "Information category", "Count", "Frequency");
  out += buf;
  out += std::string(48, '-') + "\n";
  for (const auto& row : rows) {
    const std::string name = row.stance_row ? "  " + row.label : row.label;
    std::snprintf(buf, sizeof buf, "%-28s %8lld %9.1f%%\n", name.c_str(),
                  static_cast<long long>(row.count), row.percent);
    out += buf;
  }
  out += std::string(48, '-') + "\n";
  std::snprintf(buf, sizeof buf, "knowledge comments: %lld of %lld\n",
                static_cast<long long>(knowledge_comments), static_cast<long long>(total_comments));
  out += buf;
  if (!note.empty()) out += "note: " + note + "\n";
  return out;
}

Json DistributionReport::to_json() const {
  Json rows_json = Json::array();
  for (const auto& row : rows) {
    rows_json.push_back(Json{{"label", row.label},
                             {"key", row.slug},
                             {"count", row.count},
                             {"percent", row.percent},
                             {"stance_row", row.stance_row}});
  }
  Json out{{"total_comments", total_comments},
           {"knowledge_comments", knowledge_comments},
           {"rows", rows_json}};
  if (!note.empty()) out["note"] = note;
  return out;
}

}  // namespace ck::metrics
