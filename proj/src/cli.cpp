#include "oodgate/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <set>

#include "oodgate/detection_io.hpp"
#include "oodgate/errors.hpp"
#include "oodgate/formats.hpp"
#include "oodgate/pipeline.hpp"
#include "oodgate/report.hpp"

namespace oodgate::cli {
namespace {

namespace fs = std::filesystem;
using pipeline::InputLog;
using pipeline::PipelineConfig;
using pipeline::Report;

// Raw flag values; anything left unset falls back to the config file and then
// to the built-in defaults.
struct Flags {
  std::string config;
  std::string gallery;
  std::string manifest;
  std::string ground_truth;
  std::string gate_report;
  std::string table;
  std::string tag = "default";
  std::string source_tag;
  std::vector<std::string> embeddings;
  double threshold = 0.0;
  std::size_t k = 0;
  double iou = 0.0;
  std::string weights;
  std::string out;
  std::string format;
  std::string pcc;
  std::string ap;
  double sweep_from = 0.50;
  double sweep_to = 0.99;
  double sweep_step = 0.01;
};

bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* o = sub->get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

PipelineConfig resolve_config(const Flags& f, const CLI::App* sub) {
  PipelineConfig c = f.config.empty() ? PipelineConfig{} : pipeline::load_config(f.config);
  if (given(sub, "--threshold")) c.threshold = f.threshold;
  if (given(sub, "--k")) {
    if (f.k < 1) throw ConfigError("k must be at least 1");
    c.k = f.k;
  }
  if (given(sub, "--iou")) c.iou_threshold = f.iou;
  if (given(sub, "--weights")) c.weights = pipeline::parse_weights(f.weights);
  if (given(sub, "--out")) c.output_dir = f.out;
  if (given(sub, "--format")) c.format = pipeline::parse_format(f.format);
  if (given(sub, "--pcc")) c.pcc_mode = pipeline::parse_pcc_mode(f.pcc);
  if (given(sub, "--ap")) c.ap_mode = pipeline::parse_ap_mode(f.ap);
  pipeline::validate(c);
  return c;
}

void add_config_flag(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override it");
}

void add_output_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--format", f.format, "json | csv");
}

void add_gate_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--threshold", f.threshold,
                  "In-domain similarity threshold (default 0.85)");
  sub->add_option("--k", f.k, "Neighbors averaged per query (default 1)");
}

gallery::Gallery load_gallery(const std::string& path, InputLog& log) {
  log.read(path, path);
  return gallery::load_gallery(path);
}

pipeline::Manifest load_manifest(const std::string& path, InputLog& log) {
  log.read(path, path);
  return pipeline::parse_manifest(path);
}

std::set<std::string> pass_through_from_report(const std::string& path, InputLog& log) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(log.read(path, path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("gate report is not valid JSON: " + std::string(e.what()), e.byte);
  }
  if (!j.contains("gate") || !j["gate"].contains("pass_through") ||
      !j["gate"]["pass_through"].is_array()) {
    throw FormatError("gate report has no gate.pass_through array", 0);
  }
  std::set<std::string> ids;
  for (const auto& id : j["gate"]["pass_through"]) {
    if (!id.is_string()) throw FormatError("pass_through entries must be strings", 0);
    ids.insert(id.get<std::string>());
  }
  return ids;
}

// Pass-through set for the detection/XAI stages: from a saved gate report,
// or by gating in-process when a gallery is given; otherwise unrestricted.
std::optional<std::set<std::string>> upstream_gate(const Flags& f, const PipelineConfig& c,
                                                   const pipeline::Manifest& m,
                                                   InputLog& log, Report& report) {
  if (!f.gate_report.empty() && !f.gallery.empty()) {
    throw ConfigError("give either --gate-report or --gallery, not both");
  }
  if (!f.gate_report.empty()) return pass_through_from_report(f.gate_report, log);
  if (!f.gallery.empty()) {
    const gallery::Gallery g = load_gallery(f.gallery, log);
    report.gate = pipeline::run_gate(c, g, m, log);
    return std::set<std::string>(report.gate->pass_through.begin(),
                                 report.gate->pass_through.end());
  }
  return std::nullopt;
}

int finish(Report& report, const PipelineConfig& c, InputLog& log, std::ostream& out) {
  report.config = pipeline::to_json(c);
  report.inputs = log.digests();
  for (const auto& path : pipeline::emit_report(report, c.format, c.output_dir)) {
    out << path.string() << '\n';
  }
  return report.has_empty_result() ? 3 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"oodgate: OOD gating, detection, saliency, and backbone-ranking toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pipeline::tool_version());

  Flags f;
  std::function<int()> action;

  auto* build = app.add_subcommand("gallery-build", "Build a GALV1 gallery from EMBV1 files");
  build->add_option("--embeddings", f.embeddings, "EMBV1 input files")->required();
  build->add_option("--gallery", f.gallery, "Destination (default <out>/gallery.galv1)");
  build->add_option("--source-tag", f.source_tag, "Provenance note kept in the report");
  add_config_flag(build, f);
  add_output_flags(build, f);
  build->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, build);
      InputLog log;
      const fs::path dest =
          f.gallery.empty() ? c.output_dir / "gallery.galv1" : fs::path(f.gallery);
      if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
      std::vector<fs::path> inputs(f.embeddings.begin(), f.embeddings.end());
      Report r;
      r.command = "gallery-build";
      r.gallery = pipeline::run_gallery_build(inputs, dest, f.source_tag, log);
      return finish(r, c, log, out);
    };
  });

  auto* gate = app.add_subcommand("gate", "Gate manifest images against a gallery");
  auto* eval_ood = app.add_subcommand("eval-ood", "Gate and score in/out-of-domain accuracy");
  for (auto* sub : {gate, eval_ood}) {
    sub->add_option("--gallery", f.gallery, "GALV1 gallery")->required();
    sub->add_option("--manifest", f.manifest, "Manifest JSON")->required();
    add_config_flag(sub, f);
    add_gate_flags(sub, f);
    add_output_flags(sub, f);
  }
  gate->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, gate);
      InputLog log;
      const auto g = load_gallery(f.gallery, log);
      const auto m = load_manifest(f.manifest, log);
      Report r;
      r.command = "gate";
      r.gate = pipeline::run_gate(c, g, m, log);
      return finish(r, c, log, out);
    };
  });
  eval_ood->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, eval_ood);
      InputLog log;
      const auto g = load_gallery(f.gallery, log);
      const auto m = load_manifest(f.manifest, log);
      Report r;
      r.command = "eval-ood";
      r.gate = pipeline::run_gate(c, g, m, log);
      if (!r.gate->accuracy) {
        throw NoSamplesError("no manifest entry carries a domain_label");
      }
      return finish(r, c, log, out);
    };
  });

  auto* eval_det = app.add_subcommand("eval-det", "Detection metrics over gate-passed images");
  eval_det->add_option("--manifest", f.manifest, "Manifest JSON")->required();
  eval_det->add_option("--ground-truth", f.ground_truth, "Ground-truth JSON-lines")->required();
  eval_det->add_option("--gate-report", f.gate_report, "Saved gate report to filter by");
  eval_det->add_option("--gallery", f.gallery, "Gate in-process against this gallery");
  eval_det->add_option("--iou", f.iou, "IoU match threshold (default 0.5)");
  eval_det->add_option("--ap", f.ap, "all-point | 101-point");
  add_config_flag(eval_det, f);
  add_gate_flags(eval_det, f);
  add_output_flags(eval_det, f);
  eval_det->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, eval_det);
      InputLog log;
      const auto m = load_manifest(f.manifest, log);
      const auto gts = det::parse_ground_truth(log.read(f.ground_truth, f.ground_truth));
      Report r;
      r.command = "eval-det";
      const auto pass = upstream_gate(f, c, m, log, r);
      r.detection = pipeline::run_eval_det(c, m, gts, pass, log);
      return finish(r, c, log, out);
    };
  });

  auto* eval_xai = app.add_subcommand("eval-xai", "Saliency faithfulness (MGT, PCC, RMSE)");
  eval_xai->add_option("--manifest", f.manifest, "Manifest JSON")->required();
  eval_xai->add_option("--gate-report", f.gate_report, "Saved gate report to filter by");
  eval_xai->add_option("--gallery", f.gallery, "Gate in-process against this gallery");
  eval_xai->add_option("--tag", f.tag, "Model tag for entries without one");
  eval_xai->add_option("--pcc", f.pcc, "uncentered | centered");
  add_config_flag(eval_xai, f);
  add_gate_flags(eval_xai, f);
  add_output_flags(eval_xai, f);
  eval_xai->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, eval_xai);
      InputLog log;
      const auto m = load_manifest(f.manifest, log);
      Report r;
      r.command = "eval-xai";
      const auto pass = upstream_gate(f, c, m, log, r);
      r.xai = pipeline::run_eval_xai(c, m, pass, f.tag, log);
      return finish(r, c, log, out);
    };
  });

  auto* rank = app.add_subcommand("rank", "Composite-score ranking of backbone candidates");
  rank->add_option("--table", f.table, "Backbone CSV")->required();
  rank->add_option("--weights", f.weights, "w1,w2,w3 (default 0.4,0.3,0.3)");
  add_config_flag(rank, f);
  add_output_flags(rank, f);
  rank->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, rank);
      InputLog log;
      const auto table = backbone::parse_backbone_csv(log.read(f.table, f.table));
      Report r;
      r.command = "rank";
      r.ranking = pipeline::run_rank(c, table);
      return finish(r, c, log, out);
    };
  });

  auto* sweep = app.add_subcommand("sweep-threshold", "Gate outcome across a threshold grid");
  sweep->add_option("--gallery", f.gallery, "GALV1 gallery")->required();
  sweep->add_option("--manifest", f.manifest, "Manifest JSON")->required();
  sweep->add_option("--from", f.sweep_from, "First threshold (default 0.50)");
  sweep->add_option("--to", f.sweep_to, "Last threshold (default 0.99)");
  sweep->add_option("--step", f.sweep_step, "Grid step (default 0.01)");
  add_config_flag(sweep, f);
  add_gate_flags(sweep, f);
  add_output_flags(sweep, f);
  sweep->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, sweep);
      InputLog log;
      const auto g = load_gallery(f.gallery, log);
      const auto m = load_manifest(f.manifest, log);
      Report r;
      r.command = "sweep-threshold";
      r.sweep = pipeline::run_sweep(
          g, m, c.k, pipeline::threshold_grid(f.sweep_from, f.sweep_to, f.sweep_step), log);
      return finish(r, c, log, out);
    };
  });

  auto* full = app.add_subcommand("report", "Run every stage the inputs allow");
  full->add_option("--manifest", f.manifest, "Manifest JSON")->required();
  full->add_option("--gallery", f.gallery, "GALV1 gallery (enables the gate)");
  full->add_option("--ground-truth", f.ground_truth, "Ground-truth JSON-lines");
  full->add_option("--table", f.table, "Backbone CSV");
  full->add_option("--tag", f.tag, "Model tag for entries without one");
  full->add_option("--iou", f.iou, "IoU match threshold (default 0.5)");
  full->add_option("--weights", f.weights, "w1,w2,w3 (default 0.4,0.3,0.3)");
  full->add_option("--pcc", f.pcc, "uncentered | centered");
  full->add_option("--ap", f.ap, "all-point | 101-point");
  add_config_flag(full, f);
  add_gate_flags(full, f);
  add_output_flags(full, f);
  full->callback([&] {
    action = [&] {
      const PipelineConfig c = resolve_config(f, full);
      InputLog log;
      const auto m = load_manifest(f.manifest, log);
      Report r;
      r.command = "report";
      const auto pass = upstream_gate(f, c, m, log, r);
      if (!f.ground_truth.empty()) {
        const auto gts = det::parse_ground_truth(log.read(f.ground_truth, f.ground_truth));
        r.detection = pipeline::run_eval_det(c, m, gts, pass, log);
      }
      const bool any_saliency = std::any_of(m.entries.begin(), m.entries.end(), [](const auto& e) {
        return e.heatmap_ref || e.mask_ref;
      });
      if (any_saliency) r.xai = pipeline::run_eval_xai(c, m, pass, f.tag, log);
      if (!f.table.empty()) {
        r.ranking =
            pipeline::run_rank(c, backbone::parse_backbone_csv(log.read(f.table, f.table)));
      }
      return finish(r, c, log, out);
    };
  });

  std::vector<const char*> argv{"oodgate"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, out, err);
    return 1;
  }

  try {
    return action ? action() : 1;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace oodgate::cli
