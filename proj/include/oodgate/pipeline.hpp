#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oodgate/backbone.hpp"
#include "oodgate/config.hpp"
#include "oodgate/detection.hpp"
#include "oodgate/gallery.hpp"
#include "oodgate/manifest.hpp"
#include "oodgate/saliency.hpp"

namespace oodgate::pipeline {

// Collects content digests of every file a run reads, keyed by the path as
// the user (or the manifest) wrote it.
class InputLog {
 public:
  // Reads the file, records its digest under `key`, returns the bytes.
  std::string read(const std::string& key, const std::filesystem::path& path);
  void record(const std::string& key, std::string_view bytes);
  const std::map<std::string, std::string>& digests() const { return digests_; }

 private:
  std::map<std::string, std::string> digests_;
};

struct GalleryOutput {
  std::size_t records = 0;
  std::size_t dimension = 0;
  std::string source_tag;
};

struct GateOutput {
  double threshold = 0.0;
  std::size_t k = 0;
  std::vector<gallery::SimilarityResult> results;   // ordered by image_id
  std::vector<gallery::DomainDecision> decisions;   // ordered by image_id
  std::vector<std::string> pass_through;            // InDomain ids, sorted
  std::optional<gallery::DomainAccuracyReport> accuracy;  // labeled entries
};

struct SweepPoint {
  double threshold = 0.0;
  std::size_t in_domain = 0;
  std::size_t out_of_domain = 0;
  std::optional<double> accuracy;  // over labeled entries, when any
};

struct SweepOutput {
  std::size_t k = 0;
  std::vector<SweepPoint> points;
};

struct DetectionOutput {
  bool no_samples = false;
  std::size_t images = 0;
  det::MatchResult match;
  std::map<int, double> ap;                        // classes with ground truth
  std::optional<double> map;
  std::vector<int> classes_without_ground_truth;
  std::vector<det::Curve> curves;                  // PR + confidence curves
  det::ConfusionMatrix confusion_counts;
  det::ConfusionMatrix confusion_normalized;
  std::map<int, std::optional<double>> full_precision_threshold;
};

struct XaiOutput {
  bool no_samples = false;
  xai::PccMode mode = xai::PccMode::Uncentered;
  xai::XaiEvaluation evaluation;
};

struct RankOutput {
  backbone::RankedTable table;
  std::vector<backbone::ColumnSummary> summary;
};

// Embedding of every manifest entry, in manifest order. Each entry's
// embedding_ref must hold an EMBV1 record with the entry's image_id.
std::vector<EmbeddingRecord> load_entry_embeddings(const Manifest& m,
                                                   InputLog& log);

GalleryOutput run_gallery_build(const std::vector<std::filesystem::path>& inputs,
                                const std::filesystem::path& destination,
                                const std::string& source_tag, InputLog& log);

GateOutput run_gate(const PipelineConfig& config, const gallery::Gallery& g,
                    const Manifest& m, InputLog& log);

std::vector<double> threshold_grid(double from, double to, double step);

SweepOutput run_sweep(const gallery::Gallery& g, const Manifest& m,
                      std::size_t k, const std::vector<double>& thresholds,
                      InputLog& log);

// Restricted to `pass_through` when given (two-stage semantics) and to
// entries that carry a detections_ref. An empty evaluation set yields
// `no_samples`.
DetectionOutput run_eval_det(const PipelineConfig& config, const Manifest& m,
                             const std::vector<det::GroundTruthBox>& ground_truth,
                             const std::optional<std::set<std::string>>& pass_through,
                             InputLog& log);

XaiOutput run_eval_xai(const PipelineConfig& config, const Manifest& m,
                       const std::optional<std::set<std::string>>& pass_through,
                       const std::string& default_tag, InputLog& log);

RankOutput run_rank(const PipelineConfig& config,
                    const backbone::BackboneTable& table);

}  // namespace oodgate::pipeline
