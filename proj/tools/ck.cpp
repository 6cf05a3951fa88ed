#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ck/analysis.hpp"
#include "ck/bundle.hpp"
#include "ck/config.hpp"
#include "ck/error.hpp"
#include "ck/metrics.hpp"
#include "ck/pipeline.hpp"
#include "ck/server.hpp"
#include "ck/svg.hpp"

namespace {

ck::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void write_text(const std::string& path, const std::string& bytes) {
  const std::filesystem::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path(), ec);
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw ck::Error("cannot open " + path + " for writing");
  out << bytes;
  if (!out) throw ck::Error("failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective-knowledge engine for science videos with time-synced comments"};
  app.require_subcommand(1);

  std::string config_path, danmaku_path, transcript_path, meta_path, out_path;
  auto* process = app.add_subcommand("process", "Run the pipeline and write a bundle");
  process->add_option("--config", config_path, "Pipeline configuration (TOML)");
  process->add_option("--danmaku", danmaku_path, "Danmaku XML export")->required();
  process->add_option("--transcript", transcript_path, "Transcript (.srt or line-array JSON)")->required();
  process->add_option("--meta", meta_path, "Video metadata JSON")->required();
  process->add_option("--out", out_path, "Output bundle path")->required();

  std::string serve_dir, serve_addr = "127.0.0.1:8080", static_dir, explain_url;
  auto* serve = app.add_subcommand("serve", "Serve a directory of bundles over HTTP");
  serve->add_option("--dir", serve_dir, "Directory of bundle JSON files")->required();
  serve->add_option("--addr", serve_addr, "host:port to bind");
  serve->add_option("--static", static_dir, "Directory of static viewer assets");
  serve->add_option("--explain-endpoint", explain_url, "Remote explanation backend URL");

  auto* report = app.add_subcommand("report", "Analysis reports");
  report->require_subcommand(1);
  bool dist_json = false;
  std::string dist_bundle;
  auto* distribution = report->add_subcommand("distribution", "Knowledge-type distribution");
  distribution->add_option("bundle", dist_bundle, "Bundle path")->required();
  distribution->add_flag("--json", dist_json, "Emit JSON");
  bool cov_json = false;
  std::string study_path;
  auto* coverage = report->add_subcommand("coverage", "Entity coverage study");
  coverage->add_option("--study", study_path, "Study JSON")->required();
  coverage->add_flag("--json", cov_json, "Emit JSON");

  auto* render = app.add_subcommand("render", "Render artifacts");
  render->require_subcommand(1);
  std::string render_bundle, svg_out;
  auto* render_ws = render->add_subcommand("wordstream", "Render the Wordstream layout as SVG");
  render_ws->add_option("bundle", render_bundle, "Bundle path")->required();
  render_ws->add_option("--out", svg_out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*process) {
      const auto config = config_path.empty() ? ck::PipelineConfig{} : ck::config::load(config_path);
      config.validate();
      const auto corpus = ck::ingest::load_corpus(danmaku_path, transcript_path, meta_path);
      const auto bundle = ck::run_pipeline(corpus, config);
      ck::bundle::save(bundle, out_path);
      std::cerr << "wrote " << out_path << ": " << bundle.comments.size() << " comments, "
                << bundle.provenance.knowledge_count << " knowledge, " << bundle.clusters.size()
                << " clusters, " << bundle.sections.size() << " sections\n";
      for (const auto& w : bundle.provenance.warnings) std::cerr << "warning: " << w << "\n";
    } else if (*serve) {
      ck::ServeOptions options;
      options.static_dir = static_dir;
      if (!explain_url.empty()) options.explain_endpoint = ck::remote::Endpoint::parse(explain_url);
      auto handler = std::make_shared<const ck::ApiHandler>(
          ck::ApiHandler::from_directory(serve_dir, options));
      const auto [host, port] = ck::parse_bind_address(serve_addr);
      ck::HttpServer server(handler);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << handler->video_count() << " bundle(s) on " << host << ":" << bound
                << "\n";
      server.listen();
      g_server = nullptr;
    } else if (*distribution) {
      const auto bundle = ck::bundle::load(dist_bundle);
      std::vector<ck::KnowledgeLabel> labels;
      for (const auto& c : bundle.comments) labels.push_back(c.label);
      const auto rep = ck::metrics::distribution_report(labels);
      std::cout << (dist_json ? ck::canonical_dump(rep.to_json()) + "\n" : rep.to_text());
    } else if (*coverage) {
      const auto doc = ck::Json::parse(ck::ingest::read_file(study_path));
      const auto corpora = ck::analysis::parse_study(doc);
      const auto study = ck::analysis::coverage_study(corpora);
      std::cout << (cov_json ? ck::canonical_dump(study.to_json()) + "\n" : study.to_text());
    } else if (*render_ws) {
      const auto bundle = ck::bundle::load(render_bundle);
      write_text(svg_out, ck::render_wordstream_svg(bundle.wordstream.layout));
    }
  } catch (const ck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const ck::Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
