#include "oodgate/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oodgate/errors.hpp"
#include "oodgate/formats.hpp"

#ifndef OODGATE_VERSION
#define OODGATE_VERSION "0.0.0"
#endif

namespace oodgate::pipeline {

using nlohmann::json;

namespace {

json points_json(const std::vector<det::CurvePoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
  return arr;
}

json matrix_json(const det::ConfusionMatrix& cm) {
  json labels = json::array();
  for (int c : cm.classes) labels.push_back(std::to_string(c));
  labels.push_back("background");
  json cells = json::array();
  for (const auto& row : cm.cells) {
    json r = json::array();
    for (double v : row) {
      if (cm.normalized) {
        r.push_back(v);
      } else {
        r.push_back(static_cast<std::size_t>(v));
      }
    }
    cells.push_back(std::move(r));
  }
  return {{"labels", labels},
          {"normalized", cm.normalized},
          {"rows", "predicted"},
          {"columns", "true"},
          {"cells", cells}};
}

json optional_real(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json gate_json(const GateOutput& g) {
  json decisions = json::array();
  for (std::size_t i = 0; i < g.decisions.size(); ++i) {
    const auto& d = g.decisions[i];
    const auto& r = g.results[i];
    json neighbors = json::array();
    for (const auto& n : r.neighbors) {
      neighbors.push_back({{"gallery_id", n.gallery_id}, {"similarity", n.similarity}});
    }
    decisions.push_back({{"image_id", d.query_id},
                         {"verdict", gallery::to_string(d.verdict)},
                         {"aggregate", d.aggregate},
                         {"threshold", d.threshold},
                         {"k_requested", r.k_requested},
                         {"k_used", r.k_used},
                         {"neighbors", neighbors}});
  }
  std::size_t in_domain = g.pass_through.size();
  return {{"threshold", g.threshold},
          {"k", g.k},
          {"decisions", decisions},
          {"pass_through", g.pass_through},
          {"counts",
           {{"in_domain", in_domain}, {"out_of_domain", g.decisions.size() - in_domain}}}};
}

json accuracy_json(const gallery::DomainAccuracyReport& a) {
  json cats = json::array();
  for (const auto& c : a.per_category) {
    cats.push_back({{"category", c.category},
                    {"total", c.total},
                    {"correct", c.correct},
                    {"accuracy", c.accuracy},
                    {"accuracy_percent", 100.0 * c.accuracy}});
  }
  return {{"categories", cats},
          {"overall_accuracy", a.overall_accuracy},
          {"overall_accuracy_percent", 100.0 * a.overall_accuracy},
          {"correct_in_domain", a.correct_in_domain},
          {"correct_out_of_domain", a.correct_out_of_domain},
          {"total_in_domain", a.total_in_domain},
          {"total_out_of_domain", a.total_out_of_domain}};
}

json sweep_json(const SweepOutput& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    pts.push_back({{"threshold", p.threshold},
                   {"in_domain", p.in_domain},
                   {"out_of_domain", p.out_of_domain},
                   {"accuracy", optional_real(p.accuracy)}});
  }
  return {{"k", s.k}, {"points", pts}};
}

json detection_json(const DetectionOutput& d) {
  if (d.no_samples) {
    return {{"status", "NoSamples"}, {"images", d.images}};
  }
  json per_class = json::array();
  for (const auto& [cls, c] : d.match.per_class) {
    json row = {{"class_id", cls},
                {"tp", c.tp},
                {"fp", c.fp},
                {"fn", c.fn},
                {"ground_truths", c.ground_truths},
                {"detections", c.detections}};
    const auto ap = d.ap.find(cls);
    row["ap"] = ap == d.ap.end() ? json(nullptr) : json(ap->second);
    const auto fp = d.full_precision_threshold.find(cls);
    row["full_precision_threshold"] =
        fp == d.full_precision_threshold.end() ? json(nullptr) : optional_real(fp->second);
    per_class.push_back(std::move(row));
  }
  json curves = json::array();
  for (const auto& c : d.curves) {
    curves.push_back({{"kind", det::to_string(c.kind)},
                      {"class_id", c.class_id},
                      {"points", points_json(c.points)}});
  }
  return {{"status", d.map ? "ok" : "NoSamples"},
          {"images", d.images},
          {"iou_threshold", d.match.iou_threshold},
          {"per_class", per_class},
          {"mAP", optional_real(d.map)},
          {"classes_without_ground_truth", d.classes_without_ground_truth},
          {"curves", curves},
          {"confusion_matrix", matrix_json(d.confusion_normalized)},
          {"confusion_counts", matrix_json(d.confusion_counts)}};
}

json xai_json(const XaiOutput& x) {
  json models = json::array();
  for (const auto& [tag, s] : x.evaluation.per_tag) {
    models.push_back({{"model_tag", tag},
                      {"mgt", s.mgt},
                      {"pcc", s.pcc},
                      {"rmse", s.rmse},
                      {"pairs", s.pairs},
                      {"excluded", s.excluded},
                      {"p", s.p},
                      {"n", s.n}});
  }
  json excl = json::array();
  for (const auto& e : x.evaluation.exclusions) {
    excl.push_back({{"image_id", e.id}, {"model_tag", e.model_tag}, {"reason", e.reason}});
  }
  return {{"status", x.no_samples ? "NoSamples" : "ok"},
          {"pcc_mode", x.mode == xai::PccMode::Uncentered ? "uncentered" : "centered"},
          {"models", models},
          {"exclusions", excl}};
}

json ranking_json(const RankOutput& r) {
  const auto& t = r.table;
  json models = json::array();
  std::size_t rank = 0;
  for (const auto& name : t.order) {
    const auto& row = *std::find_if(t.rows.begin(), t.rows.end(),
                                    [&](const auto& x) { return x.name == name; });
    const auto& s = t.scores.at(name);
    models.push_back({{"rank", ++rank},
                      {"name", name},
                      {"score", s.score},
                      {"components",
                       {{"accuracy", s.accuracy},
                        {"efficiency", s.efficiency},
                        {"robustness", s.robustness}}},
                      {"pareto", t.pareto.count(name) > 0},
                      {"parameters_m", row.parameters},
                      {"flops_g", row.flops},
                      {"feature_time_s", row.feature_time},
                      {"total_time_s", row.total_time},
                      {"in_domain_acc", row.in_domain_acc},
                      {"ood_mean_acc", row.ood_mean()}});
  }
  json summary = json::array();
  for (const auto& s : r.summary) {
    json row = {{"column", s.column},
                {"count", s.stats.count},
                {"mean", s.stats.mean},
                {"median", s.stats.median},
                {"printed_mean", optional_real(s.printed_mean)},
                {"printed_median", optional_real(s.printed_median)},
                {"mean_flagged", s.mean_flagged},
                {"median_flagged", s.median_flagged}};
    row["mean_delta"] =
        s.printed_mean ? json(s.stats.mean - *s.printed_mean) : json(nullptr);
    row["median_delta"] =
        s.printed_median ? json(s.stats.median - *s.printed_median) : json(nullptr);
    summary.push_back(std::move(row));
  }
  return {{"weights",
           {{"accuracy", t.weights.accuracy},
            {"efficiency", t.weights.efficiency},
            {"robustness", t.weights.robustness}}},
          {"order", t.order},
          {"models", models},
          {"pareto_front", std::vector<std::string>(t.pareto.begin(), t.pareto.end())},
          {"summary", summary}};
}

void render(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += json(key).dump();
        out += ": ";
        render(value, indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool scalars = std::all_of(j.begin(), j.end(),
                                       [](const json& e) { return e.is_primitive(); });
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          render(j[i], indent + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        render(j[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_real(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

}  // namespace

const char* tool_version() { return OODGATE_VERSION; }

bool Report::has_empty_result() const {
  if (detection && (detection->no_samples || !detection->map)) return true;
  if (xai && xai->no_samples) return true;
  return false;
}

json to_json(const Report& r) {
  json j;
  j["tool"] = {{"name", kToolName}, {"version", tool_version()}};
  j["command"] = r.command;
  j["config"] = r.config;
  j["inputs"] = r.inputs;
  if (r.gallery) {
    j["gallery"] = {{"records", r.gallery->records},
                    {"dimension", r.gallery->dimension},
                    {"source_tag", r.gallery->source_tag}};
  }
  if (r.gate) {
    j["gate"] = gate_json(*r.gate);
    if (r.gate->accuracy) j["domain_accuracy"] = accuracy_json(*r.gate->accuracy);
  }
  if (r.sweep) j["sweep"] = sweep_json(*r.sweep);
  if (r.detection) j["detection"] = detection_json(*r.detection);
  if (r.xai) j["xai"] = xai_json(*r.xai);
  if (r.ranking) j["ranking"] = ranking_json(*r.ranking);
  return j;
}

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", v);
  return buf;
}

std::string render_json(const json& j) {
  std::string out;
  render(j, 0, out);
  out += '\n';
  return out;
}

std::vector<CsvTable> to_csv_tables(const Report& r) {
  std::vector<CsvTable> tables;

  CsvTable inputs{"inputs", {"path", "sha256"}, {}};
  for (const auto& [path, digest] : r.inputs) inputs.rows.push_back({path, digest});
  tables.push_back(std::move(inputs));

  CsvTable config{"config", {"key", "value"}, {}};
  for (const auto& [key, value] : r.config.items()) {
    config.rows.push_back({key, value.is_number_float() ? format_real(value.get<double>())
                                : value.is_string()     ? value.get<std::string>()
                                                        : value.dump()});
  }
  tables.push_back(std::move(config));

  if (r.gallery) {
    tables.push_back({"gallery",
                      {"records", "dimension", "source_tag"},
                      {{std::to_string(r.gallery->records),
                        std::to_string(r.gallery->dimension), r.gallery->source_tag}}});
  }

  if (r.gate) {
    CsvTable t{"decisions",
               {"image_id", "verdict", "aggregate", "threshold", "k_used",
                "nearest_id", "nearest_similarity"},
               {}};
    for (std::size_t i = 0; i < r.gate->decisions.size(); ++i) {
      const auto& d = r.gate->decisions[i];
      const auto& res = r.gate->results[i];
      t.rows.push_back({d.query_id, gallery::to_string(d.verdict), format_real(d.aggregate),
                        format_real(d.threshold), std::to_string(res.k_used),
                        res.neighbors.front().gallery_id,
                        format_real(res.neighbors.front().similarity)});
    }
    tables.push_back(std::move(t));
    if (const auto& a = r.gate->accuracy) {
      CsvTable acc{"domain_accuracy",
                   {"category", "total", "correct", "accuracy_percent"},
                   {}};
      std::size_t total = 0, correct = 0;
      for (const auto& c : a->per_category) {
        acc.rows.push_back({c.category, std::to_string(c.total), std::to_string(c.correct),
                            format_real(100.0 * c.accuracy)});
        total += c.total;
        correct += c.correct;
      }
      acc.rows.push_back({"TOTAL", std::to_string(total), std::to_string(correct),
                          format_real(100.0 * a->overall_accuracy)});
      tables.push_back(std::move(acc));
    }
  }

  if (r.sweep) {
    CsvTable t{"sweep", {"threshold", "in_domain", "out_of_domain", "accuracy"}, {}};
    for (const auto& p : r.sweep->points) {
      t.rows.push_back({format_real(p.threshold), std::to_string(p.in_domain),
                        std::to_string(p.out_of_domain), csv_optional(p.accuracy)});
    }
    tables.push_back(std::move(t));
  }

  if (r.detection && !r.detection->no_samples) {
    const auto& d = *r.detection;
    CsvTable ap{"ap",
                {"class_id", "tp", "fp", "fn", "ground_truths", "detections", "ap"},
                {}};
    for (const auto& [cls, c] : d.match.per_class) {
      const auto it = d.ap.find(cls);
      ap.rows.push_back({std::to_string(cls), std::to_string(c.tp), std::to_string(c.fp),
                         std::to_string(c.fn), std::to_string(c.ground_truths),
                         std::to_string(c.detections),
                         it == d.ap.end() ? "" : format_real(it->second)});
    }
    ap.rows.push_back({"mAP", "", "", "", "", "", csv_optional(d.map)});
    tables.push_back(std::move(ap));

    CsvTable curves{"curves", {"kind", "class_id", "x", "y"}, {}};
    for (const auto& c : d.curves) {
      for (const auto& p : c.points) {
        curves.rows.push_back({det::to_string(c.kind), std::to_string(c.class_id),
                               format_real(p.x), format_real(p.y)});
      }
    }
    tables.push_back(std::move(curves));

    CsvTable cm{"confusion", {"predicted"}, {}};
    const auto& m = d.confusion_normalized;
    for (int c : m.classes) cm.header.push_back(std::to_string(c));
    cm.header.push_back("background");
    for (std::size_t row = 0; row < m.cells.size(); ++row) {
      std::vector<std::string> line{row == m.background() ? "background"
                                                          : std::to_string(m.classes[row])};
      for (double v : m.cells[row]) line.push_back(format_real(v));
      cm.rows.push_back(std::move(line));
    }
    tables.push_back(std::move(cm));
  }

  if (r.xai) {
    CsvTable t{"xai", {"model_tag", "mgt", "pcc", "rmse", "pairs", "excluded"}, {}};
    for (const auto& [tag, s] : r.xai->evaluation.per_tag) {
      t.rows.push_back({tag, format_real(s.mgt), format_real(s.pcc), format_real(s.rmse),
                        std::to_string(s.pairs), std::to_string(s.excluded)});
    }
    tables.push_back(std::move(t));
    CsvTable ex{"xai_exclusions", {"image_id", "model_tag", "reason"}, {}};
    for (const auto& e : r.xai->evaluation.exclusions) {
      ex.rows.push_back({e.id, e.model_tag, e.reason});
    }
    tables.push_back(std::move(ex));
  }

  if (r.ranking) {
    const auto& t = r.ranking->table;
    CsvTable rank{"ranking",
                  {"rank", "name", "score", "accuracy", "efficiency", "robustness", "pareto"},
                  {}};
    std::size_t i = 0;
    for (const auto& name : t.order) {
      const auto& s = t.scores.at(name);
      rank.rows.push_back({std::to_string(++i), name, format_real(s.score),
                           format_real(s.accuracy), format_real(s.efficiency),
                           format_real(s.robustness), t.pareto.count(name) ? "1" : "0"});
    }
    tables.push_back(std::move(rank));
    CsvTable summary{"summary",
                     {"column", "count", "mean", "median", "printed_mean", "printed_median",
                      "mean_flagged", "median_flagged"},
                     {}};
    for (const auto& s : r.ranking->summary) {
      summary.rows.push_back({s.column, std::to_string(s.stats.count),
                              format_real(s.stats.mean), format_real(s.stats.median),
                              csv_optional(s.printed_mean), csv_optional(s.printed_median),
                              s.mean_flagged ? "1" : "0", s.median_flagged ? "1" : "0"});
    }
    tables.push_back(std::move(summary));
  }
  return tables;
}

std::string render_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return out;
}

std::vector<std::filesystem::path> emit_report(const Report& r, OutputFormat format,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::Json) {
    const auto path = dir / (r.command + ".json");
    formats::write_file(path, render_json(to_json(r)));
    written.push_back(path);
    return written;
  }
  for (const auto& t : to_csv_tables(r)) {
    const auto path = dir / (r.command + "_" + t.name + ".csv");
    formats::write_file(path, render_csv(t));
    written.push_back(path);
  }
  return written;
}

}  // namespace oodgate::pipeline
