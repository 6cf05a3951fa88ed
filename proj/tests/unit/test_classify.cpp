#include <gtest/gtest.h>

#include <random>

#include "ck/classify.hpp"
#include "ck/error.hpp"
#include "ck/metrics.hpp"
#include "ck/remote.hpp"
#include "fake_backend.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ck;

namespace {

std::vector<DanmakuComment> sample_comments(std::mt19937& rng, int n) {
  const std::vector<std::string> pool = {
      "why does the nodule look pink?", "233333", "nitrogenase", "I think this is amazing",
      "my teacher showed us this in class when I was young", "actually lightning fixes nitrogen",
      "哈哈哈哈", "原来是根瘤菌", "this is wrong and misleading", "the plant pays with sugar, so cool"};
  std::vector<DanmakuComment> out;
  for (int i = 0; i < n; ++i) {
    DanmakuComment c;
    c.id = "c" + std::to_string(i);
    c.video_id = "v";
    c.t = ingest::quantize_ms(testsupport::uniform(rng, 0, 120));
    c.text = pool[static_cast<std::size_t>(testsupport::uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))];
    out.push_back(c);
  }
  return out;
}

class FailingBackend final : public ClassifierBackend {
 public:
  std::vector<std::optional<KnowledgeLabel>> classify_batch(std::span<const ClassifyItem>) override {
    throw BackendError("unavailable");
  }
  std::string descriptor() const override { return "failing"; }
};

}  // namespace

TEST(Label, EightInternalStatesSevenCategories) {
  std::vector<KnowledgeLabel> states = {KnowledgeLabel::none()};
  for (auto s : {Stance::Positive, Stance::Neutral, Stance::Negative})
    states.push_back(KnowledgeLabel::interpretation(s));
  for (auto t : kThemes)
    if (t != Theme::Interpretation) states.push_back(KnowledgeLabel::theme(t));
  ASSERT_EQ(states.size(), 8u);
  std::set<std::string> names;
  for (const auto& s : states) {
    names.insert(s.to_string());
    EXPECT_EQ(KnowledgeLabel::parse(s.to_string()), s);
    EXPECT_EQ(s.category().has_value(), s.is_knowledge());
    EXPECT_EQ(s.stance().has_value(), s.theme() == Theme::Interpretation);
  }
  EXPECT_EQ(names.size(), 8u);
  EXPECT_FALSE(KnowledgeLabel::parse("interpretation").has_value());
  for (auto c : kDisplayCategories) EXPECT_EQ(KnowledgeLabel::from_category(c).category(), c);
}

TEST(Lexicon, ReferenceExamples) {
  EXPECT_EQ(lexicon_classify("Why is the probability of irrational numbers equal to 1?", ""),
            KnowledgeLabel::theme(Theme::Inquiry));
  EXPECT_EQ(lexicon_classify("D'Alembert's criterion.", ""), KnowledgeLabel::theme(Theme::ConceptNoting));
  EXPECT_EQ(lexicon_classify("My mother passed away from this disease, which was discovered to be liver "
                             "metastasis. I hope that one day the world can eradicate cancer.",
                             ""),
            KnowledgeLabel::theme(Theme::ExperienceSharing));
  EXPECT_EQ(lexicon_classify("\"Han\" refers to a geographical location; its original meaning pertains to "
                             "the Han River, which later extended to denote the regions through which "
                             "the Han River flows, and subsequently acquired additional meanings.",
                             ""),
            KnowledgeLabel::theme(Theme::SupplementaryKnowledge));
  const auto euler = lexicon_classify(
      "Russia invests heavily in scientists; bringing over one Euler would recoup all the expenses.",
      "Leonhard Euler spent much of his career in St. Petersburg, Russia.");
  EXPECT_EQ(euler.theme(), Theme::Interpretation);
}

TEST(Lexicon, NoiseIsNotKnowledge) {
  for (const char* s : {"233333", "a", "哈哈哈哈", "666", "？？？？", "orz", ""})
    EXPECT_FALSE(lexicon_classify(s, "").is_knowledge()) << s;
}

TEST(Lexicon, StanceFromCueCounts) {
  EXPECT_EQ(lexicon_stance("great and amazing"), Stance::Positive);
  EXPECT_EQ(lexicon_stance("the plant takes sugar"), Stance::Neutral);
  EXPECT_EQ(lexicon_stance("good but wrong, bad and misleading"), Stance::Negative);
}

TEST(Lexicon, StatementOpeningsAreNotQuestions) {
  EXPECT_EQ(lexicon_classify("what a wonderful lecture", "").theme(), Theme::Interpretation);
  EXPECT_EQ(lexicon_classify("when I was a kid I used to grow beans", "").theme(),
            Theme::ExperienceSharing);
  EXPECT_EQ(lexicon_classify("what is a nodule", "").theme(), Theme::Inquiry);
}

TEST(Lexicon, NamedTermMissingFromContextIsSupplementary) {
  const std::string text = "Bacteria called Frankia form similar nodules on alder trees";
  EXPECT_EQ(lexicon_classify(text, "nodules keep oxygen low").theme(), Theme::SupplementaryKnowledge);
  EXPECT_FALSE(lexicon_classify(text, "").theme() == Theme::SupplementaryKnowledge);
}

TEST(Lexicon, CueMatchingRespectsWordBoundaries) {
  EXPECT_EQ(count_cue_hits("this is so cool", {"so"}), 1u);
  EXPECT_EQ(count_cue_hits("also soup", {"so"}), 0u);
  EXPECT_EQ(count_cue_hits("原来是根瘤菌，根瘤", {"根瘤"}), 2u);
}

TEST(Lexicon, HandLabeledFixtureMatches) {
  for (const auto& c : testsupport::labeled_fixture())
    EXPECT_EQ(lexicon_classify(c.text, c.context).to_string(), c.label) << c.text;
}

TEST(Lexicon, CustomLexiconParses) {
  const auto lex = Lexicon::parse("[opinion]\nneat\n[positive]\nneat\n");
  EXPECT_EQ(lexicon_classify("the demo is neat indeed", "", lex),
            KnowledgeLabel::interpretation(Stance::Positive));
  EXPECT_NE(lex.descriptor(), Lexicon::builtin().descriptor());
}

TEST(ClassifyCorpus, ContextWindowCoversTenSeconds) {
  std::vector<TranscriptLine> lines = {{1, 0, 5, "alpha"}, {2, 5, 15, "beta"}, {3, 30, 35, "gamma"}};
  const auto ctx = context_window(lines, 20.0, 10.0);
  EXPECT_EQ(ctx.find("alpha"), std::string::npos);
  EXPECT_NE(ctx.find("beta"), std::string::npos);
  EXPECT_NE(ctx.find("gamma"), std::string::npos);
}

TEST(ClassifyCorpus, ParallelismDoesNotChangeResults) {
  std::mt19937 rng(17);
  const auto comments = sample_comments(rng, 500);
  const auto& lines = testsupport::fixture_corpus().lines;
  LexiconBackend backend;
  ClassifyOptions one;
  ClassifyOptions eight;
  eight.parallelism = 8;
  eight.batch_size = 7;
  const auto a = classify_corpus(comments, lines, backend, one);
  const auto b = classify_corpus(comments, lines, backend, eight);
  ASSERT_EQ(a.comments.size(), comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    EXPECT_EQ(a.comments[i].comment, comments[i]);
    EXPECT_EQ(a.comments[i].label, b.comments[i].label);
  }
  EXPECT_EQ(a.fallback_count, 0u);
}

TEST(ClassifyCorpus, EmptyInput) {
  LexiconBackend backend;
  EXPECT_TRUE(classify_corpus({}, {}, backend, {}).comments.empty());
}

TEST(ClassifyCorpus, FailingBackendFallsBack) {
  std::mt19937 rng(2);
  const auto comments = sample_comments(rng, 40);
  FailingBackend failing;
  LexiconBackend lexicon;
  const auto r = classify_corpus(comments, {}, failing, {});
  const auto expected = classify_corpus(comments, {}, lexicon, {});
  EXPECT_EQ(r.fallback_count, comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i)
    EXPECT_EQ(r.comments[i].label, expected.comments[i].label);
}

TEST(ClassifyCorpus, NoFallbackRaisesBackendError) {
  std::mt19937 rng(2);
  const auto comments = sample_comments(rng, 5);
  FailingBackend failing;
  ClassifyOptions opts;
  opts.allow_fallback = false;
  EXPECT_THROW(classify_corpus(comments, {}, failing, opts), BackendError);
}

TEST(RemoteClassifier, MalformedBatchFallsBackPerComment) {
  // Batches are answered correctly except any batch containing c3, which
  // gets a malformed payload.
  testsupport::FakeBackend fake([](const std::string& body) -> std::pair<int, std::string> {
    const auto items = Json::parse(body);
    Json out = Json::array();
    for (const auto& item : items) {
      if (item["id"] == "c3") return {200, "{not json"};
      out.push_back({{"id", item["id"]}, {"label", "inquiry"}});
    }
    return {200, out.dump()};
  });
  std::mt19937 rng(4);
  const auto comments = sample_comments(rng, 10);
  remote::RemoteClassifier backend(remote::Endpoint::parse(fake.url("/classify"), 2000));
  ClassifyOptions opts;
  opts.batch_size = 4;
  const auto r = classify_corpus(comments, {}, backend, opts);
  EXPECT_EQ(r.fallback_count, 4u);
  EXPECT_GT(fake.calls(), 0);
  for (std::size_t i = 0; i < comments.size(); ++i) {
    if (i < 4) {
      EXPECT_EQ(r.comments[i].label, lexicon_classify(comments[i].text, ""));
    } else {
      EXPECT_EQ(r.comments[i].label, KnowledgeLabel::theme(Theme::Inquiry));
    }
  }
}

TEST(RemoteClassifier, UnreachableWithoutFallback) {
  remote::RemoteClassifier backend(remote::Endpoint::parse("http://127.0.0.1:1/x", 500));
  std::mt19937 rng(4);
  const auto comments = sample_comments(rng, 3);
  ClassifyOptions opts;
  opts.allow_fallback = false;
  EXPECT_THROW(classify_corpus(comments, {}, backend, opts), BackendError);
}

TEST(Kappa, HandComputedTables) {
  using V = std::vector<std::string>;
  EXPECT_DOUBLE_EQ(metrics::cohens_kappa(V{"x", "x", "y", "y"}, V{"y", "y", "x", "x"}), -1.0);
  EXPECT_DOUBLE_EQ(metrics::cohens_kappa(V{"x", "x", "x", "y"}, V{"x", "x", "y", "y"}), 0.5);
  EXPECT_DOUBLE_EQ(metrics::cohens_kappa(V{"x", "y", "z"}, V{"x", "y", "z"}), 1.0);
}

TEST(Kappa, Errors) {
  using V = std::vector<std::string>;
  EXPECT_THROW(metrics::cohens_kappa(V{"x", "x"}, V{"x", "x"}), DegenerateInputError);
  EXPECT_THROW(metrics::cohens_kappa(V{"x"}, V{"x", "y"}), ValidationError);
  EXPECT_THROW(metrics::cohens_kappa(V{}, V{}), ValidationError);
}

TEST(Kappa, PropertiesOnRandomVectors) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = testsupport::uniform_int(rng, 2, 40);
    const int k = testsupport::uniform_int(rng, 2, 5);
    std::vector<std::string> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(std::string(1, static_cast<char>('a' + testsupport::uniform_int(rng, 0, k - 1))));
      b.push_back(std::string(1, static_cast<char>('a' + testsupport::uniform_int(rng, 0, k - 1))));
    }
    a[0] = "a";
    a[1] = "b";
    const double kab = metrics::cohens_kappa(a, b);
    EXPECT_NEAR(metrics::cohens_kappa(b, a), kab, 1e-12);
    EXPECT_NEAR(kab, oracle::kappa(a, b), 1e-12);
    EXPECT_GE(kab, -1.0 - 1e-12);
    EXPECT_LE(kab, 1.0 + 1e-12);
    auto p = a;
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_DOUBLE_EQ(metrics::cohens_kappa(p, p), 1.0);
  }
}

TEST(F1, HandComputedMatrix) {
  metrics::ConfusionMatrix m{{"a", "b"}, {{8, 2}, {4, 6}}};
  const auto r = metrics::f1_report(m);
  EXPECT_NEAR(r.classes[0].f1, 8.0 / (8.0 + 0.5 * (2 + 4)), 1e-12);
  EXPECT_NEAR(r.classes[0].f1, 0.7273, 5e-5);
  EXPECT_NEAR(r.classes[0].precision, 8.0 / 12.0, 1e-12);
  EXPECT_NEAR(r.classes[0].recall, 0.8, 1e-12);
}

TEST(F1, DiagonalAndZeroSupport) {
  EXPECT_DOUBLE_EQ(metrics::f1_report({{"a", "b", "c"}, {{3, 0, 0}, {0, 4, 0}, {0, 0, 1}}}).macro_f1, 1.0);
  const auto r = metrics::f1_report({{"a", "b", "c"}, {{3, 0, 0}, {0, 4, 0}, {0, 0, 0}}});
  EXPECT_TRUE(r.classes[2].zero_support);
  EXPECT_EQ(r.classes[2].f1, 0.0);
  EXPECT_THROW(metrics::f1_report({{"a", "b"}, {{0, 0}, {0, 0}}}), DegenerateInputError);
  EXPECT_THROW(metrics::f1_report({{"a", "b"}, {{1, -1}, {0, 0}}}), ValidationError);
  EXPECT_THROW(metrics::f1_report({{"a"}, {{1}}}), ValidationError);
}

TEST(F1, MacroInvariantUnderJointPermutation) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = testsupport::uniform_int(rng, 2, 6);
    metrics::ConfusionMatrix m;
    for (int i = 0; i < k; ++i) m.classes.push_back("c" + std::to_string(i));
    m.counts.assign(static_cast<std::size_t>(k), std::vector<std::int64_t>(static_cast<std::size_t>(k)));
    for (auto& row : m.counts)
      for (auto& x : row) x = testsupport::uniform_int(rng, 0, 20);
    m.counts[0][0] += 1;
    std::vector<std::size_t> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    metrics::ConfusionMatrix p = m;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      p.classes[i] = m.classes[perm[i]];
      for (std::size_t j = 0; j < perm.size(); ++j) p.counts[i][j] = m.counts[perm[i]][perm[j]];
    }
    EXPECT_NEAR(metrics::f1_report(m).macro_f1, metrics::f1_report(p).macro_f1, 1e-12);
  }
}

TEST(Distribution, HandLabeledFixturePercentages) {
  std::vector<KnowledgeLabel> labels;
  for (const auto& c : testsupport::labeled_fixture()) labels.push_back(*KnowledgeLabel::parse(c.label));
  const auto r = metrics::distribution_report(labels);
  EXPECT_EQ(r.total_comments, 100);
  EXPECT_EQ(r.knowledge_comments, 100);
  std::map<std::string, double> pct;
  for (const auto& row : r.rows) pct[row.label] = row.percent;
  EXPECT_DOUBLE_EQ(pct["Interpretation"], 54.0);
  EXPECT_DOUBLE_EQ(pct["Inquiry"], 13.0);
  EXPECT_DOUBLE_EQ(pct["Experience sharing"], 12.0);
  EXPECT_DOUBLE_EQ(pct["Concept noting"], 12.0);
  EXPECT_DOUBLE_EQ(pct["Supplementary knowledge"], 9.0);
}

TEST(Distribution, PercentagesSumToHundred) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<KnowledgeLabel> labels;
    const int n = testsupport::uniform_int(rng, 1, 300);
    for (int i = 0; i < n; ++i) {
      const int pick = testsupport::uniform_int(rng, 0, 7);
      labels.push_back(pick == 7 ? KnowledgeLabel::none()
                                 : KnowledgeLabel::from_category(kDisplayCategories[static_cast<std::size_t>(pick)]));
    }
    const auto r = metrics::distribution_report(labels);
    double sum = 0;
    for (const auto& row : r.rows)
      if (!row.stance_row) sum += row.percent;
    if (r.knowledge_comments > 0) EXPECT_NEAR(sum, 100.0, 1e-9);
  }
}
