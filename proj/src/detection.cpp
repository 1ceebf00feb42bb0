#include "oodgate/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "oodgate/errors.hpp"

namespace oodgate::det {
namespace {

std::string box_text(const BoundingBox& b) {
  return "[" + std::to_string(b.x1) + ", " + std::to_string(b.y1) + ", " +
         std::to_string(b.x2) + ", " + std::to_string(b.y2) + "]";
}

// Class detections in matching order, with running TP counts.
struct ClassSequence {
  std::vector<double> confidence;
  std::vector<bool> is_tp;
  std::size_t ground_truths = 0;
};

ClassSequence class_sequence(const MatchResult& m, int class_id) {
  ClassSequence s;
  for (const auto& r : m.records) {
    if (r.detection.class_id != class_id) continue;
    s.confidence.push_back(r.detection.confidence);
    s.is_tp.push_back(r.matched);
  }
  if (auto it = m.per_class.find(class_id); it != m.per_class.end()) {
    s.ground_truths = it->second.ground_truths;
  }
  return s;
}

}  // namespace

void validate(const BoundingBox& b) {
  const bool finite = std::isfinite(b.x1) && std::isfinite(b.y1) &&
                      std::isfinite(b.x2) && std::isfinite(b.y2);
  if (!finite || !(b.x2 > b.x1) || !(b.y2 > b.y1)) {
    throw InvalidBoxError("degenerate box " + box_text(b));
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  validate(a);
  validate(b);
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<GroundTruthBox>& gts,
                             double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError("IoU threshold must lie in (0, 1]");
  }
  MatchResult m;
  m.iou_threshold = iou_threshold;

  // (image, class) -> ground-truth indices in input order.
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> pool;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    validate(gts[i].box);
    if (gts[i].class_id < 0) {
      throw FormatError("negative class id in ground truth", i);
    }
    pool[{gts[i].image_id, gts[i].class_id}].push_back(i);
    ++m.per_class[gts[i].class_id].ground_truths;
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < dets.size(); ++i) {
    validate(dets[i].box);
    if (dets[i].class_id < 0) throw FormatError("negative class id in detection", i);
    if (!(dets[i].confidence >= 0.0 && dets[i].confidence <= 1.0)) {
      throw FormatError("detection confidence outside [0, 1]", i);
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dets[a].confidence != dets[b].confidence) {
                       return dets[a].confidence > dets[b].confidence;
                     }
                     return dets[a].image_id < dets[b].image_id;
                   });

  std::vector<bool> consumed(gts.size(), false);
  m.records.reserve(dets.size());
  for (std::size_t idx : order) {
    const Detection& d = dets[idx];
    DetectionMatch rec;
    rec.detection = d;
    rec.input_index = idx;

    double best = -1.0;
    std::optional<std::size_t> best_gt;
    if (auto it = pool.find({d.image_id, d.class_id}); it != pool.end()) {
      for (std::size_t g : it->second) {
        if (consumed[g]) continue;
        const double v = iou(d.box, gts[g].box);
        if (v > best) {
          best = v;
          best_gt = g;
        }
      }
    }

    auto& counts = m.per_class[d.class_id];
    ++counts.detections;
    if (best_gt && best >= iou_threshold) {
      consumed[*best_gt] = true;
      rec.matched = true;
      rec.matched_gt = best_gt;
      rec.iou = best;
      ++counts.tp;
    } else {
      ++counts.fp;
    }
    m.records.push_back(std::move(rec));
  }

  for (auto& [cls, counts] : m.per_class) {
    counts.fn = counts.ground_truths - counts.tp;
  }
  return m;
}

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::PR: return "pr";
    case CurveKind::PrecisionConfidence: return "precision_confidence";
    case CurveKind::RecallConfidence: return "recall_confidence";
    case CurveKind::F1Confidence: return "f1_confidence";
  }
  return "unknown";
}

Curve pr_curve(const MatchResult& m, int class_id) {
  Curve c;
  c.kind = CurveKind::PR;
  c.class_id = class_id;
  const ClassSequence s = class_sequence(m, class_id);
  if (s.confidence.empty()) {
    c.no_samples = true;
    return c;
  }
  if (s.ground_truths == 0) {
    throw UndefinedRecallError("class " + std::to_string(class_id) +
                               " has no ground truth");
  }
  const double total = static_cast<double>(s.ground_truths);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < s.confidence.size(); ++i) {
    if (s.is_tp[i]) ++tp;
    const bool last_of_level =
        i + 1 == s.confidence.size() || s.confidence[i + 1] != s.confidence[i];
    if (!last_of_level) continue;
    const double precision =
        static_cast<double>(tp) / static_cast<double>(i + 1);
    c.points.push_back({static_cast<double>(tp) / total, precision});
  }
  return c;
}

double average_precision(const Curve& pr, ApInterpolation mode) {
  if (pr.points.empty()) {
    throw NoSamplesError("average precision of an empty curve");
  }
  const auto& pts = pr.points;
  // envelope[i] = max precision over points at index >= i (recall is sorted).
  std::vector<double> envelope(pts.size());
  double running = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    running = std::max(running, pts[i].y);
    envelope[i] = running;
  }

  if (mode == ApInterpolation::AllPoint) {
    double area = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      area += (pts[i].x - prev_recall) * envelope[i];
      prev_recall = pts[i].x;
    }
    return std::clamp(area, 0.0, 1.0);
  }

  double sum = 0.0;
  std::size_t j = 0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    while (j < pts.size() && pts[j].x < r) ++j;
    sum += j < pts.size() ? envelope[j] : 0.0;
  }
  return sum / 101.0;
}

double mean_average_precision(const std::map<int, double>& aps) {
  if (aps.empty()) throw NoSamplesError("mAP over zero classes");
  double sum = 0.0;
  for (const auto& [cls, ap] : aps) sum += ap;
  return sum / static_cast<double>(aps.size());
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

ConfidenceCurves confidence_curves(const MatchResult& m, int class_id) {
  ConfidenceCurves out;
  out.precision.kind = CurveKind::PrecisionConfidence;
  out.recall.kind = CurveKind::RecallConfidence;
  out.f1.kind = CurveKind::F1Confidence;
  out.precision.class_id = out.recall.class_id = out.f1.class_id = class_id;

  const ClassSequence s = class_sequence(m, class_id);
  if (s.confidence.empty()) {
    out.precision.no_samples = out.recall.no_samples = out.f1.no_samples = true;
    return out;
  }
  if (s.ground_truths == 0) {
    throw UndefinedRecallError("class " + std::to_string(class_id) +
                               " has no ground truth");
  }

  std::set<double> thresholds(s.confidence.begin(), s.confidence.end());
  thresholds.insert(0.0);
  thresholds.insert(1.0);
  const double total = static_cast<double>(s.ground_truths);
  for (double t : thresholds) {
    std::size_t kept = 0, tp = 0;
    for (std::size_t i = 0; i < s.confidence.size(); ++i) {
      if (s.confidence[i] < t) continue;
      ++kept;
      if (s.is_tp[i]) ++tp;
    }
    const double p =
        kept == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(kept);
    const double r = static_cast<double>(tp) / total;
    out.precision.points.push_back({t, p});
    out.recall.points.push_back({t, r});
    out.f1.points.push_back({t, f1_score(p, r)});
  }
  return out;
}

std::optional<double> full_precision_threshold(const MatchResult& m,
                                               int class_id) {
  const ClassSequence s = class_sequence(m, class_id);
  std::set<double> thresholds(s.confidence.begin(), s.confidence.end());
  for (double t : thresholds) {
    std::size_t kept = 0, tp = 0;
    for (std::size_t i = 0; i < s.confidence.size(); ++i) {
      if (s.confidence[i] < t) continue;
      ++kept;
      if (s.is_tp[i]) ++tp;
    }
    if (kept > 0 && tp == kept) return t;
  }
  return std::nullopt;
}

ConfusionMatrix confusion_matrix(const MatchResult& m, bool normalize) {
  ConfusionMatrix cm;
  cm.normalized = normalize;
  for (const auto& [cls, counts] : m.per_class) cm.classes.push_back(cls);
  const std::size_t n = cm.classes.size() + 1;
  cm.cells.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < cm.classes.size(); ++i) {
    const ClassCounts& c = m.per_class.at(cm.classes[i]);
    cm.cells[i][i] += static_cast<double>(c.tp);
    cm.cells[i][cm.background()] += static_cast<double>(c.fp);
    cm.cells[cm.background()][i] += static_cast<double>(c.fn);
  }
  if (normalize) {
    for (std::size_t col = 0; col < n; ++col) {
      double sum = 0.0;
      for (std::size_t row = 0; row < n; ++row) sum += cm.cells[row][col];
      if (sum == 0.0) continue;
      for (std::size_t row = 0; row < n; ++row) cm.cells[row][col] /= sum;
    }
  }
  return cm;
}

}  // namespace oodgate::det
