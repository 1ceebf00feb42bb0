#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oodgate/detection.hpp"
#include "oodgate/formats.hpp"
#include "oodgate/saliency.hpp"

namespace oodgate::testing {

namespace fs = std::filesystem;

// Seeded generator. Draws go through mt19937_64 bits directly so sequences
// are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }
  double normal();  // Box-Muller
 private:
  std::mt19937_64 engine_;
};

std::vector<float> random_unit(Rng& rng, std::size_t dim);

// Fresh empty directory under the system temp dir.
fs::path scratch_dir(const std::string& name);

// 436 labeled test embeddings against a 200-vector gallery: 34 in-domain
// (33 above 0.85), then 381 and 21 out-of-domain, all far below.
struct GateAccuracyCorpus {
  fs::path gallery;
  fs::path manifest;
};
GateAccuracyCorpus write_gate_accuracy_corpus(const fs::path& dir);

// Small end-to-end corpus: training embeddings, gallery, labeled test
// embeddings, detections + ground truth, heatmap/mask pairs for two model
// tags, and a copy of the backbone table when `backbone_csv` is given.
struct FixtureCorpus {
  fs::path train_embeddings;
  fs::path gallery;
  fs::path manifest;
  fs::path ground_truth;
  fs::path backbone_table;  // empty when not copied
};
FixtureCorpus write_fixture_corpus(const fs::path& dir, std::uint64_t seed,
                                   const fs::path& backbone_csv = {});

// Independent reference implementations, deliberately naive.
namespace oracle {

// Per-threshold enumeration: for every distinct confidence t, re-match only
// the detections with confidence >= t, then integrate the precision envelope
// max{P(t') : R(t') >= r} over recall.
double brute_force_ap(const std::vector<det::Detection>& dets,
                      const std::vector<det::GroundTruthBox>& gts, int class_id,
                      double iou_threshold);

double iou(const det::BoundingBox& a, const det::BoundingBox& b);

// Pixel i is among the top p when fewer than p pixels outrank it, where j
// outranks i if h[j] > h[i], or h[j] == h[i] and j < i.
double mgt(const xai::Heatmap& h, const xai::BinaryMask& m);

}  // namespace oracle

// Random detection problem: up to `max_dets` detections and `max_gts` ground
// truths over `max_classes` classes on a coarse grid, so overlaps and
// confidence ties are frequent.
struct DetectionInstance {
  std::vector<det::Detection> dets;
  std::vector<det::GroundTruthBox> gts;
};
DetectionInstance random_detection_instance(Rng& rng, std::size_t max_dets,
                                            std::size_t max_gts, int max_classes);

// Heatmap values on a 1/8 lattice (ties are common); mask has >= 1 positive.
struct SaliencyInstance {
  xai::Heatmap heatmap;
  xai::BinaryMask mask;
};
SaliencyInstance random_saliency_instance(Rng& rng, std::size_t max_side);

}  // namespace oodgate::testing
