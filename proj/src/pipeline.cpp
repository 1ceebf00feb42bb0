#include "oodgate/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "oodgate/detection_io.hpp"
#include "oodgate/digest.hpp"
#include "oodgate/errors.hpp"
#include "oodgate/formats.hpp"

namespace oodgate::pipeline {
namespace {

// Runs fn(i) for i in [0, n) on a few workers. Results land in caller-owned
// slots indexed by i, so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  if (n < 256 || workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::size_t> order_by_image_id(const Manifest& m) {
  std::vector<std::size_t> order(m.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m.entries[a].image_id < m.entries[b].image_id;
  });
  return order;
}

bool admitted(const std::optional<std::set<std::string>>& pass_through,
              const std::string& id) {
  return !pass_through || pass_through->count(id) > 0;
}

}  // namespace

std::string InputLog::read(const std::string& key,
                           const std::filesystem::path& path) {
  std::string bytes = formats::read_file(path);
  record(key, bytes);
  return bytes;
}

void InputLog::record(const std::string& key, std::string_view bytes) {
  digests_[key] = sha256_hex(bytes);
}

std::vector<EmbeddingRecord> load_entry_embeddings(const Manifest& m,
                                                   InputLog& log) {
  // Shared files are decoded once.
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>>
      index;
  std::unordered_map<std::string, VectorFile> files;
  std::vector<EmbeddingRecord> out;
  out.reserve(m.entries.size());
  for (const auto& e : m.entries) {
    auto file_it = files.find(e.embedding_ref);
    if (file_it == files.end()) {
      VectorFile f = formats::decode_vector_file(
          log.read(e.embedding_ref, m.resolve(e.embedding_ref)),
          VectorFileKind::Embeddings);
      auto& ids = index[e.embedding_ref];
      for (std::size_t i = 0; i < f.records.size(); ++i) ids[f.records[i].id] = i;
      file_it = files.emplace(e.embedding_ref, std::move(f)).first;
    }
    const auto& ids = index[e.embedding_ref];
    const auto rec = ids.find(e.image_id);
    if (rec == ids.end()) {
      throw FormatError("'" + e.embedding_ref + "' has no record for image '" +
                            e.image_id + "'",
                        0);
    }
    out.push_back(file_it->second.records[rec->second]);
  }
  return out;
}

GalleryOutput run_gallery_build(const std::vector<std::filesystem::path>& inputs,
                                const std::filesystem::path& destination,
                                const std::string& source_tag, InputLog& log) {
  if (inputs.empty()) throw EmptyGalleryError("no embedding files given");
  std::vector<EmbeddingRecord> records;
  for (const auto& path : inputs) {
    VectorFile f = formats::decode_vector_file(log.read(path.string(), path),
                                               VectorFileKind::Embeddings);
    for (auto& r : f.records) records.push_back(std::move(r));
  }
  const gallery::Gallery g = gallery::build_gallery(std::move(records), source_tag);
  gallery::persist_gallery(g, destination);
  return {g.size(), g.dimension(), g.source_tag()};
}

GateOutput run_gate(const PipelineConfig& config, const gallery::Gallery& g,
                    const Manifest& m, InputLog& log) {
  validate(config);
  const std::vector<EmbeddingRecord> queries = load_entry_embeddings(m, log);
  const std::vector<std::size_t> order = order_by_image_id(m);

  GateOutput out;
  out.threshold = config.threshold;
  out.k = config.k;
  out.results.resize(order.size());
  parallel_for(order.size(), [&](std::size_t i) {
    out.results[i] = gallery::query_similarity(g, queries[order[i]], config.k);
  });

  std::vector<gallery::DomainDecision> labeled;
  std::vector<gallery::DomainLabel> labels;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const ManifestEntry& e = m.entries[order[i]];
    gallery::DomainDecision d = gallery::decide(out.results[i], config.threshold);
    if (d.verdict == gallery::Domain::InDomain) out.pass_through.push_back(e.image_id);
    if (e.domain_label) {
      labeled.push_back(d);
      labels.push_back({e.image_id, *e.domain_label, e.category_or_label()});
    }
    out.decisions.push_back(std::move(d));
  }
  if (!labeled.empty()) {
    out.accuracy = gallery::evaluate_domain_accuracy(labeled, labels);
  }
  return out;
}

std::vector<double> threshold_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(from <= to) || from < -1.0 || to > 1.0) {
    throw ConfigError("sweep grid needs -1 <= from <= to <= 1 and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Snap to 10 decimals so 0.5 + 35 * 0.01 is the same double as 0.85.
    grid.push_back(std::round((from + static_cast<double>(i) * step) * 1e10) / 1e10);
  }
  return grid;
}

SweepOutput run_sweep(const gallery::Gallery& g, const Manifest& m,
                      std::size_t k, const std::vector<double>& thresholds,
                      InputLog& log) {
  if (k < 1) throw ConfigError("k must be at least 1");
  const std::vector<EmbeddingRecord> queries = load_entry_embeddings(m, log);
  std::vector<double> aggregates(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    aggregates[i] = gallery::query_similarity(g, queries[i], k).aggregate;
  });

  SweepOutput out;
  out.k = k;
  for (double t : thresholds) {
    SweepPoint p;
    p.threshold = t;
    std::size_t labeled = 0, correct = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const bool in_domain = aggregates[i] >= t;
      in_domain ? ++p.in_domain : ++p.out_of_domain;
      if (const auto& label = m.entries[i].domain_label) {
        ++labeled;
        if (in_domain == (*label == gallery::Domain::InDomain)) ++correct;
      }
    }
    if (labeled > 0) {
      p.accuracy = static_cast<double>(correct) / static_cast<double>(labeled);
    }
    out.points.push_back(p);
  }
  return out;
}

DetectionOutput run_eval_det(const PipelineConfig& config, const Manifest& m,
                             const std::vector<det::GroundTruthBox>& ground_truth,
                             const std::optional<std::set<std::string>>& pass_through,
                             InputLog& log) {
  validate(config);
  DetectionOutput out;

  std::set<std::string> ids;
  std::set<std::string> refs;
  for (const auto& e : m.entries) {
    if (!e.detections_ref || !admitted(pass_through, e.image_id)) continue;
    ids.insert(e.image_id);
    refs.insert(*e.detections_ref);
  }
  out.images = ids.size();
  if (ids.empty()) {
    out.no_samples = true;
    return out;
  }

  std::vector<det::Detection> dets;
  for (const auto& ref : refs) {
    for (auto& d : det::parse_detections(log.read(ref, m.resolve(ref)))) {
      if (ids.count(d.image_id)) dets.push_back(std::move(d));
    }
  }
  std::vector<det::GroundTruthBox> gts;
  for (const auto& g : ground_truth) {
    if (ids.count(g.image_id)) gts.push_back(g);
  }

  out.match = det::match_detections(dets, gts, config.iou_threshold);
  for (const auto& [cls, counts] : out.match.per_class) {
    if (counts.ground_truths == 0) {
      out.classes_without_ground_truth.push_back(cls);
      continue;
    }
    out.full_precision_threshold[cls] = det::full_precision_threshold(out.match, cls);
    if (counts.detections == 0) {
      out.ap[cls] = 0.0;
      continue;
    }
    det::Curve pr = det::pr_curve(out.match, cls);
    out.ap[cls] = det::average_precision(pr, config.ap_mode);
    det::ConfidenceCurves cc = det::confidence_curves(out.match, cls);
    out.curves.push_back(std::move(pr));
    out.curves.push_back(std::move(cc.precision));
    out.curves.push_back(std::move(cc.recall));
    out.curves.push_back(std::move(cc.f1));
  }
  if (!out.ap.empty()) out.map = det::mean_average_precision(out.ap);
  out.confusion_counts = det::confusion_matrix(out.match, false);
  out.confusion_normalized = det::confusion_matrix(out.match, true);
  return out;
}

XaiOutput run_eval_xai(const PipelineConfig& config, const Manifest& m,
                       const std::optional<std::set<std::string>>& pass_through,
                       const std::string& default_tag, InputLog& log) {
  XaiOutput out;
  out.mode = config.pcc_mode;

  std::vector<xai::SaliencyPair> pairs;
  std::vector<xai::Exclusion> missing;
  for (std::size_t idx : order_by_image_id(m)) {
    const ManifestEntry& e = m.entries[idx];
    if (!e.heatmap_ref && !e.mask_ref) continue;
    if (!admitted(pass_through, e.image_id)) continue;
    const std::string tag = e.model_tag.value_or(default_tag);
    if (!e.heatmap_ref || !e.mask_ref) {
      missing.push_back({e.image_id, tag,
                         e.heatmap_ref ? "missing mask_ref" : "missing heatmap_ref"});
      continue;
    }
    xai::SaliencyPair pair;
    pair.id = e.image_id;
    pair.model_tag = tag;
    pair.heatmap =
        formats::decode_heatmap(log.read(*e.heatmap_ref, m.resolve(*e.heatmap_ref)));
    pair.mask = formats::decode_mask(log.read(*e.mask_ref, m.resolve(*e.mask_ref)));
    pairs.push_back(std::move(pair));
  }

  try {
    out.evaluation = xai::evaluate_xai(pairs, config.pcc_mode);
  } catch (const NoSamplesError&) {
    out.no_samples = true;
    for (const auto& p : pairs) {
      try {
        xai::score_pair(p.heatmap, p.mask, config.pcc_mode);
      } catch (const Error& e) {
        out.evaluation.exclusions.push_back(
            {p.id, p.model_tag, std::string(to_string(e.kind())) + ": " + e.what()});
      }
    }
  }
  for (auto& x : missing) {
    if (auto it = out.evaluation.per_tag.find(x.model_tag);
        it != out.evaluation.per_tag.end()) {
      ++it->second.excluded;
    }
    out.evaluation.exclusions.push_back(std::move(x));
  }
  std::stable_sort(out.evaluation.exclusions.begin(), out.evaluation.exclusions.end(),
                   [](const xai::Exclusion& a, const xai::Exclusion& b) {
                     return a.id < b.id;
                   });
  return out;
}

RankOutput run_rank(const PipelineConfig& config,
                    const backbone::BackboneTable& table) {
  backbone::validate(config.weights);
  RankOutput out;
  out.table = backbone::rank_models(table.rows, config.weights);
  out.summary = backbone::table_summary(table);
  return out;
}

}  // namespace oodgate::pipeline
