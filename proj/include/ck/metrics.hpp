#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ck/canonical_json.hpp"
#include "ck/classify.hpp"

namespace ck::metrics {

/// Cohen's kappa over two label sequences of equal length. Throws
/// DegenerateInputError when chance agreement is 1.
double cohens_kappa(std::span<const std::string> a, std::span<const std::string> b);

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> counts;

  void validate() const;
};

struct ClassScore {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  bool zero_support = false;
};

struct F1Report {
  std::vector<ClassScore> classes;
  double macro_f1 = 0.0;
};

F1Report f1_report(const ConfusionMatrix& matrix);

struct DistributionRow {
  std::string label;
  std::string slug;  // theme name or display slug
  std::int64_t count = 0;
  double percent = 0.0;
  bool stance_row = false;
};

struct DistributionReport {
  std::int64_t total_comments = 0;
  std::int64_t knowledge_comments = 0;
  std::vector<DistributionRow> rows;  // theme rows, interpretation followed by its stances
  std::string note;

  std::string to_text() const;
  Json to_json() const;
};

DistributionReport distribution_report(std::span<const KnowledgeLabel> labels);

}  // namespace ck::metrics
