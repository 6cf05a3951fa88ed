#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ck/analysis.hpp"
#include "ck/bundle.hpp"
#include "ck/classify.hpp"
#include "ck/config.hpp"
#include "ck/error.hpp"
#include "ck/metrics.hpp"
#include "ck/pipeline.hpp"
#include "ck/presentation.hpp"
#include "ck/semantics.hpp"
#include "ck/server.hpp"
#include "ck/structure.hpp"

namespace py = pybind11;

namespace {

std::vector<float> embed_list(const std::string& text) {
  const auto e = ck::semantics::embed(text);
  return {e.begin(), e.end()};
}

ck::Embedding to_embedding(const std::vector<float>& v) {
  if (v.size() != ck::kEmbeddingDim) {
    throw ck::ValidationError("embedding must have " + std::to_string(ck::kEmbeddingDim) +
                              " components");
  }
  ck::Embedding e{};
  std::copy(v.begin(), v.end(), e.begin());
  return e;
}

py::dict wilcoxon(const std::vector<std::pair<double, double>>& pairs) {
  const auto r = ck::analysis::wilcoxon_signed_rank(pairs);
  py::dict d;
  d["n_effective"] = r.n_effective;
  d["w_plus"] = r.w_plus;
  d["w_minus"] = r.w_minus;
  d["w"] = r.w;
  d["z"] = r.z;
  d["z_uncorrected"] = r.z_uncorrected;
  d["p_two_sided"] = r.p_two_sided;
  d["p_normal"] = r.p_normal;
  d["method"] = r.method == ck::analysis::WilcoxonMethod::Exact ? "exact" : "normal-approx";
  d["effect_size"] = r.effect_size;
  d["rank_biserial"] = r.rank_biserial;
  return d;
}

std::string process(const std::string& danmaku_xml, const std::string& transcript,
                    const std::string& meta_json, const std::string& transcript_format,
                    const std::string& config_toml) {
  const auto config = config_toml.empty() ? ck::PipelineConfig{} : ck::config::parse(config_toml);
  config.validate();
  const auto corpus = ck::ingest::assemble_corpus(
      danmaku_xml, transcript, ck::ingest::transcript_format_from_string(transcript_format),
      meta_json);
  return ck::bundle::serialize(ck::run_pipeline(corpus, config));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Collective-knowledge engine core";

  py::register_exception<ck::Error>(m, "CkError", PyExc_RuntimeError);

  m.def("classify", [](const std::string& text, const std::string& context) {
    return ck::lexicon_classify(text, context).to_string();
  }, py::arg("text"), py::arg("context") = "",
        "Lexicon-baseline label: 'none' or a display-category slug.");

  m.def("embed", &embed_list, py::arg("text"));
  m.def("cosine", [](const std::vector<float>& a, const std::vector<float>& b) {
    return ck::semantics::cosine(to_embedding(a), to_embedding(b));
  }, py::arg("a"), py::arg("b"));

  m.def("dbscan_texts", [](const std::vector<std::string>& texts, double eps, int min_pts) {
    std::vector<ck::Embedding> points;
    for (const auto& t : texts) points.push_back(ck::semantics::embed(t));
    return ck::semantics::dbscan(points, eps, min_pts);
  }, py::arg("texts"), py::arg("eps"), py::arg("min_pts"),
        "Cluster labels (noise = -1) over the texts' embeddings.");

  m.def("extract_keyword", [](const std::string& text, const std::vector<std::string>& corpus) {
    return ck::semantics::extract_keyword(text, ck::semantics::CorpusStats::build(corpus));
  }, py::arg("text"), py::arg("corpus"));

  m.def("cohens_kappa", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return ck::metrics::cohens_kappa(a, b);
  }, py::arg("a"), py::arg("b"));

  m.def("wilcoxon", &wilcoxon, py::arg("pairs"));

  m.def("scroll_spec", [](std::size_t length, std::size_t size) {
    const auto s = ck::presentation::scroll_spec(length, size);
    py::dict d;
    d["duration"] = s.duration;
    d["font_scale"] = s.font_scale;
    d["badge"] = s.badge;
    d["badge_count"] = s.badge_count;
    return d;
  }, py::arg("length_chars"), py::arg("cluster_size"));

  m.def("process", &process, py::arg("danmaku_xml"), py::arg("transcript"),
        py::arg("meta_json"), py::arg("transcript_format") = "srt", py::arg("config_toml") = "",
        "Runs the full pipeline and returns the canonical bundle JSON.");

  m.def("validate_bundle", [](const std::string& bundle_json) {
    ck::bundle::parse(bundle_json);
  }, py::arg("bundle_json"));

  m.def("distribution_report", [](const std::string& bundle_json) {
    const auto b = ck::bundle::parse(bundle_json);
    std::vector<ck::KnowledgeLabel> labels;
    for (const auto& c : b.comments) labels.push_back(c.label);
    return ck::canonical_dump(ck::metrics::distribution_report(labels).to_json());
  }, py::arg("bundle_json"));

  m.def("coverage_study", [](const std::string& study_json) {
    const auto corpora = ck::analysis::parse_study(ck::Json::parse(study_json));
    return ck::canonical_dump(ck::analysis::coverage_study(corpora).to_json());
  }, py::arg("study_json"));

  py::class_<ck::ApiHandler, std::shared_ptr<ck::ApiHandler>>(m, "Api")
      .def(py::init([](const std::vector<std::string>& bundles_json) {
             std::vector<ck::KnowledgeBundle> bundles;
             for (const auto& j : bundles_json) bundles.push_back(ck::bundle::parse(j));
             return std::make_shared<ck::ApiHandler>(std::move(bundles));
           }),
           py::arg("bundles_json"))
      .def("get", [](const ck::ApiHandler& api, const std::string& path,
                     const std::map<std::string, std::string>& query) {
             ck::QueryParams q(query.begin(), query.end());
             const auto r = api.handle(path, q);
             return std::make_pair(r.status, r.body);
           },
           py::arg("path"), py::arg("query") = std::map<std::string, std::string>{},
           "Returns (status, canonical JSON body).");
}
