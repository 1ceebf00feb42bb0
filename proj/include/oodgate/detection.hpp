#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oodgate::det {

inline constexpr double kDefaultIouThreshold = 0.5;

// Axis-aligned box in pixel corner convention; x2 > x1 and y2 > y1.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double area() const { return (x2 - x1) * (y2 - y1); }

  // Converts a top-left (x, y, width, height) box.
  static BoundingBox from_xywh(double x, double y, double w, double h) {
    return {x, y, x + w, y + h};
  }
};

// Throws InvalidBoxError for non-finite or zero/negative-area boxes.
void validate(const BoundingBox& b);

struct Detection {
  std::string image_id;
  int class_id = 0;
  BoundingBox box;
  double confidence = 0.0;
};

struct GroundTruthBox {
  std::string image_id;
  int class_id = 0;
  BoundingBox box;
};

double iou(const BoundingBox& a, const BoundingBox& b);

struct DetectionMatch {
  Detection detection;
  std::size_t input_index = 0;
  bool matched = false;
  std::optional<std::size_t> matched_gt;  // index into the ground truths
  double iou = 0.0;                       // IoU with the matched ground truth
};

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ground_truths = 0;
  std::size_t detections = 0;
};

struct MatchResult {
  double iou_threshold = kDefaultIouThreshold;
  // Descending confidence; ties by image_id, then input order.
  std::vector<DetectionMatch> records;
  std::map<int, ClassCounts> per_class;
};

// Greedy matching: each detection, in the order above, claims the unmatched
// same-image same-class ground truth with the highest IoU (lowest index on
// ties) when that IoU reaches the threshold; otherwise it is a false positive.
MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<GroundTruthBox>& gts,
                             double iou_threshold = kDefaultIouThreshold);

enum class CurveKind { PR, PrecisionConfidence, RecallConfidence, F1Confidence };

const char* to_string(CurveKind kind);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct Curve {
  CurveKind kind = CurveKind::PR;
  int class_id = 0;
  std::vector<CurvePoint> points;
  bool no_samples = false;
};

// (recall, precision) after each distinct confidence level, walking the
// detections of `class_id` from most to least confident. Detections sharing
// a confidence enter together, so the curve depends only on thresholds.
// Returns a `no_samples` curve when the class has no detections or is absent;
// throws UndefinedRecallError when it has detections but no ground truth.
Curve pr_curve(const MatchResult& m, int class_id);

enum class ApInterpolation {
  AllPoint,       // exact area under the monotone precision envelope
  Recall101,      // mean of the envelope sampled at recall 0, 0.01, ..., 1
};

// Throws NoSamplesError on an empty curve.
double average_precision(const Curve& pr,
                         ApInterpolation mode = ApInterpolation::AllPoint);

// Unweighted mean over classes; NoSamplesError when empty.
double mean_average_precision(const std::map<int, double>& aps);

// F1 = 2PR / (P + R), defined as 0 when P + R = 0.
double f1_score(double precision, double recall);

struct ConfidenceCurves {
  Curve precision;
  Curve recall;
  Curve f1;
};

// Sampled at every distinct confidence of the class plus 0 and 1, ascending.
// Precision at a threshold no detection reaches is reported as 0.
ConfidenceCurves confidence_curves(const MatchResult& m, int class_id);

// Smallest sampled threshold at which precision over the retained detections
// is exactly 1, if any.
std::optional<double> full_precision_threshold(const MatchResult& m,
                                               int class_id);

// Rows are predicted class, columns true class; the last row/column is
// background. TP at (c, c), FP at (c, bg), missed ground truth at (bg, c).
struct ConfusionMatrix {
  std::vector<int> classes;                  // ascending; background excluded
  std::vector<std::vector<double>> cells;    // [predicted][true]
  bool normalized = false;

  std::size_t background() const { return classes.size(); }
};

ConfusionMatrix confusion_matrix(const MatchResult& m, bool normalize);

}  // namespace oodgate::det
