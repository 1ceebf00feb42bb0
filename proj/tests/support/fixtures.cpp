#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include <json.hpp>

#include "oodgate/detection_io.hpp"
#include "oodgate/gallery.hpp"

namespace oodgate::testing {
namespace {

using nlohmann::json;

std::string numbered(const char* prefix, std::size_t i, int width = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%0*zu", prefix, width, i);
  return buf;
}

numerics::FeatureVector axis_plus_noise(Rng& rng, std::size_t dim, std::size_t axis,
                                        std::size_t noise_from, std::size_t noise_to,
                                        double sigma) {
  numerics::FeatureVector v(dim, 0.0f);
  v[axis] = 1.0f;
  for (std::size_t i = noise_from; i < noise_to; ++i) {
    v[i] = static_cast<float>(sigma * rng.normal());
  }
  return v;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<float> random_unit(Rng& rng, std::size_t dim) {
  std::vector<float> v(dim);
  double norm = 0.0;
  while (norm < 1e-6) {
    norm = 0.0;
    for (auto& x : v) {
      x = static_cast<float>(rng.normal());
      norm += static_cast<double>(x) * x;
    }
  }
  return numerics::l2_normalize(v);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("oodgate-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

GateAccuracyCorpus write_gate_accuracy_corpus(const fs::path& dir) {
  constexpr std::size_t kDim = 16;
  Rng rng(0x7AB1E3);
  fs::create_directories(dir);

  std::vector<EmbeddingRecord> train;
  for (std::size_t i = 0; i < 200; ++i) {
    train.push_back({numbered("train", i, 4), axis_plus_noise(rng, kDim, 0, 1, 8, 0.08)});
  }

  std::vector<EmbeddingRecord> test;
  json entries = json::array();
  auto add = [&](EmbeddingRecord rec, const char* label, const char* category) {
    entries.push_back({{"image_id", rec.id},
                       {"domain_label", label},
                       {"category", category},
                       {"embedding_ref", "test.emb"}});
    test.push_back(std::move(rec));
  };

  // Passing in-domain queries sit next to a gallery member.
  for (std::size_t i = 0; i < 33; ++i) {
    auto v = train[i * 6].vector;
    for (std::size_t d = 1; d < 8; ++d) v[d] += static_cast<float>(0.01 * rng.normal());
    add({numbered("id", i), v}, "InDomain", "in_domain_test");
  }
  // The one miss: cosine to any member is at most 0.6.
  {
    numerics::FeatureVector v(kDim, 0.0f);
    v[0] = 0.6f;
    v[8] = 0.8f;
    add({numbered("id", 33), v}, "InDomain", "in_domain_test");
  }
  // OOD queries live mostly in dimensions the gallery never uses.
  auto ood = [&](std::size_t i, const char* prefix, const char* category) {
    numerics::FeatureVector v(kDim, 0.0f);
    const auto tail = random_unit(rng, kDim - 8);
    for (std::size_t d = 0; d < tail.size(); ++d) v[8 + d] = tail[d];
    v[0] = 0.3f;
    add({numbered(prefix, i), v}, "OOD", category);
  };
  for (std::size_t i = 0; i < 381; ++i) ood(i, "ood2", "ood_testdata2");
  for (std::size_t i = 0; i < 21; ++i) ood(i, "ood3", "ood_testdata3");

  formats::write_vector_file(dir / "test.emb", VectorFileKind::Embeddings, kDim, test);
  GateAccuracyCorpus c{dir / "gallery.galv1", dir / "manifest.json"};
  gallery::persist_gallery(gallery::build_gallery(std::move(train), "gate-accuracy-fixture"),
                           c.gallery);
  formats::write_file(c.manifest, json{{"entries", entries}}.dump(2) + "\n");
  return c;
}

FixtureCorpus write_fixture_corpus(const fs::path& dir, std::uint64_t seed,
                                   const fs::path& backbone_csv) {
  constexpr std::size_t kDim = 32;
  constexpr std::size_t kSide = 16;
  constexpr double kFrame = 640.0;
  Rng rng(seed);
  fs::create_directories(dir / "xai");

  FixtureCorpus c;
  c.train_embeddings = dir / "train.emb";
  c.gallery = dir / "gallery.galv1";
  c.manifest = dir / "manifest.json";
  c.ground_truth = dir / "ground_truth.jsonl";

  std::vector<EmbeddingRecord> train;
  for (std::size_t i = 0; i < 60; ++i) {
    train.push_back({numbered("train", i), axis_plus_noise(rng, kDim, 0, 1, 16, 0.1)});
  }
  formats::write_vector_file(c.train_embeddings, VectorFileKind::Embeddings, kDim, train);
  gallery::persist_gallery(gallery::build_gallery(train, "fixture"), c.gallery);

  std::vector<EmbeddingRecord> test;
  std::vector<det::Detection> dets;
  std::vector<det::GroundTruthBox> gts;
  json entries = json::array();

  auto random_box = [&] {
    const double w = rng.uniform(40.0, 160.0);
    const double h = rng.uniform(40.0, 160.0);
    const double x = rng.uniform(0.0, kFrame - w);
    const double y = rng.uniform(0.0, kFrame - h);
    return det::BoundingBox{round_to(x, 0.5), round_to(y, 0.5), round_to(x + w, 0.5),
                            round_to(y + h, 0.5)};
  };
  auto confidence = [&](double lo, double hi) { return round_to(rng.uniform(lo, hi), 0.001); };

  for (std::size_t i = 0; i < 10; ++i) {
    const std::string id = numbered("img", i, 2);
    numerics::FeatureVector v;
    if (i < 9) {
      v = train[i * 5].vector;
      for (std::size_t d = 1; d < 16; ++d) v[d] += static_cast<float>(0.02 * rng.normal());
    } else {
      v.assign(kDim, 0.0f);
      v[0] = 0.5f;
      v[20] = 0.85f;
    }
    test.push_back({id, v});

    const std::size_t n_gt = 1 + rng.below(3);
    for (std::size_t g = 0; g < n_gt; ++g) {
      const int cls = static_cast<int>(rng.below(2));
      const auto box = random_box();
      gts.push_back({id, cls, box});
      if (rng.uniform() < 0.85) {
        const double jx = rng.uniform(-12.0, 12.0);
        const double jy = rng.uniform(-12.0, 12.0);
        const det::BoundingBox moved{box.x1 + jx, box.y1 + jy, box.x2 + jx, box.y2 + jy};
        dets.push_back({id, cls, moved, confidence(0.45, 0.99)});
        if (rng.uniform() < 0.3) dets.push_back({id, cls, moved, confidence(0.2, 0.5)});
      }
    }
    if (rng.uniform() < 0.5) {
      dets.push_back({id, static_cast<int>(rng.below(2)), random_box(), confidence(0.05, 0.7)});
    }

    json e = {{"image_id", id},
              {"domain_label", "InDomain"},
              {"category", "in_domain_test"},
              {"embedding_ref", "test.emb"},
              {"detections_ref", "detections.jsonl"}};
    if (i < 9) {
      // Rectangular lesion mask with a blurred, noisy heatmap over it;
      // img-08 carries an empty mask and must be excluded.
      xai::BinaryMask mask{kSide, kSide, std::vector<std::uint8_t>(kSide * kSide, 0)};
      const std::size_t r0 = 2 + rng.below(6), c0 = 2 + rng.below(6);
      const std::size_t rh = 3 + rng.below(5), cw = 3 + rng.below(5);
      if (i != 8) {
        for (std::size_t r = r0; r < r0 + rh; ++r) {
          for (std::size_t col = c0; col < c0 + cw; ++col) mask.values[r * kSide + col] = 1;
        }
      }
      const double cy = r0 + rh / 2.0 + rng.uniform(-1.5, 1.5);
      const double cx = c0 + cw / 2.0 + rng.uniform(-1.5, 1.5);
      const double spread = rng.uniform(2.0, 4.0);
      xai::Heatmap heat{kSide, kSide, std::vector<float>(kSide * kSide)};
      for (std::size_t r = 0; r < kSide; ++r) {
        for (std::size_t col = 0; col < kSide; ++col) {
          const double d2 = (r - cy) * (r - cy) + (col - cx) * (col - cx);
          const double v = std::exp(-d2 / (2 * spread * spread)) + 0.05 * rng.uniform();
          heat.values[r * kSide + col] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
      formats::write_heatmap(dir / "xai" / (id + ".hmp"), heat);
      formats::write_mask(dir / "xai" / (id + ".msk"), mask);
      e["heatmap_ref"] = "xai/" + id + ".hmp";
      e["mask_ref"] = "xai/" + id + ".msk";
      e["model_tag"] = i % 2 == 0 ? "yolov8" : "yolov11";
    }
    entries.push_back(e);
  }

  for (std::size_t i = 0; i < 6; ++i) {
    const std::string id = numbered("ood", i, 2);
    numerics::FeatureVector v(kDim, 0.0f);
    const auto tail = random_unit(rng, 16);
    for (std::size_t d = 0; d < 16; ++d) v[16 + d] = tail[d];
    v[0] = 0.2f;
    test.push_back({id, v});
    dets.push_back({id, 0, random_box(), confidence(0.3, 0.9)});
    entries.push_back({{"image_id", id},
                       {"domain_label", "OOD"},
                       {"category", "ood_other_modality"},
                       {"embedding_ref", "test.emb"},
                       {"detections_ref", "detections.jsonl"}});
  }

  formats::write_vector_file(dir / "test.emb", VectorFileKind::Embeddings, kDim, test);
  formats::write_file(dir / "detections.jsonl", det::to_jsonl(dets));
  formats::write_file(c.ground_truth, det::to_jsonl(gts));
  formats::write_file(c.manifest, json{{"entries", entries}}.dump(2) + "\n");
  if (!backbone_csv.empty()) {
    c.backbone_table = dir / "backbones.csv";
    fs::copy_file(backbone_csv, c.backbone_table, fs::copy_options::overwrite_existing);
  }
  return c;
}

namespace oracle {

double iou(const det::BoundingBox& a, const det::BoundingBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0 || h <= 0) return 0.0;
  const double inter = w * h;
  const double uni = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  return inter / uni;
}

double brute_force_ap(const std::vector<det::Detection>& dets,
                      const std::vector<det::GroundTruthBox>& gts, int class_id,
                      double iou_threshold) {
  std::vector<std::size_t> cls_dets;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].class_id == class_id) cls_dets.push_back(i);
  }
  std::vector<std::size_t> cls_gts;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (gts[j].class_id == class_id) cls_gts.push_back(j);
  }
  const double n_gt = static_cast<double>(cls_gts.size());

  std::set<double, std::greater<>> thresholds;
  for (std::size_t i : cls_dets) thresholds.insert(dets[i].confidence);

  std::vector<std::pair<double, double>> rp;  // (recall, precision) per threshold
  for (double t : thresholds) {
    std::vector<std::size_t> kept;
    for (std::size_t i : cls_dets) {
      if (dets[i].confidence >= t) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
      if (dets[a].confidence != dets[b].confidence) {
        return dets[a].confidence > dets[b].confidence;
      }
      if (dets[a].image_id != dets[b].image_id) return dets[a].image_id < dets[b].image_id;
      return a < b;
    });
    std::vector<bool> used(gts.size(), false);
    std::size_t tp = 0;
    for (std::size_t i : kept) {
      double best = -1.0;
      std::size_t best_j = 0;
      for (std::size_t j : cls_gts) {
        if (used[j] || gts[j].image_id != dets[i].image_id) continue;
        const double o = oracle::iou(dets[i].box, gts[j].box);
        if (o > best) {
          best = o;
          best_j = j;
        }
      }
      if (best >= iou_threshold) {
        used[best_j] = true;
        ++tp;
      }
    }
    rp.emplace_back(tp / n_gt, static_cast<double>(tp) / kept.size());
  }

  std::set<double> recalls;
  for (const auto& [r, p] : rp) {
    if (r > 0) recalls.insert(r);
  }
  double ap = 0.0;
  double prev = 0.0;
  for (double r : recalls) {
    double envelope = 0.0;
    for (const auto& [r2, p2] : rp) {
      if (r2 >= r) envelope = std::max(envelope, p2);
    }
    ap += (r - prev) * envelope;
    prev = r;
  }
  return ap;
}

double mgt(const xai::Heatmap& h, const xai::BinaryMask& m) {
  const std::size_t n_px = h.values.size();
  std::size_t p = 0;
  for (auto b : m.values) p += b;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_px; ++i) {
    std::size_t outranked_by = 0;
    for (std::size_t j = 0; j < n_px; ++j) {
      if (h.values[j] > h.values[i] || (h.values[j] == h.values[i] && j < i)) {
        ++outranked_by;
      }
    }
    if (outranked_by < p && m.values[i] == 1) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(p);
}

}  // namespace oracle

DetectionInstance random_detection_instance(Rng& rng, std::size_t max_dets,
                                            std::size_t max_gts, int max_classes) {
  static const char* kImages[] = {"a", "b"};
  auto grid_box = [&] {
    const double x = 10.0 * rng.below(5);
    const double y = 10.0 * rng.below(5);
    return det::BoundingBox{x, y, x + 10.0 * (1 + rng.below(3)), y + 10.0 * (1 + rng.below(3))};
  };
  DetectionInstance inst;
  const std::size_t n_gt = rng.below(max_gts + 1);
  const std::size_t n_det = rng.below(max_dets + 1);
  for (std::size_t j = 0; j < n_gt; ++j) {
    inst.gts.push_back({kImages[rng.below(2)],
                        static_cast<int>(rng.below(static_cast<std::size_t>(max_classes))),
                        grid_box()});
  }
  for (std::size_t i = 0; i < n_det; ++i) {
    det::Detection d;
    if (!inst.gts.empty() && rng.uniform() < 0.6) {
      // Perturb a ground truth so matches actually occur.
      const auto& g = inst.gts[rng.below(inst.gts.size())];
      const double s = 5.0 * rng.below(3);
      d = {g.image_id, g.class_id, {g.box.x1 + s, g.box.y1, g.box.x2 + s, g.box.y2}, 0.0};
    } else {
      d = {kImages[rng.below(2)],
           static_cast<int>(rng.below(static_cast<std::size_t>(max_classes))), grid_box(), 0.0};
    }
    d.confidence = static_cast<double>(1 + rng.below(10)) / 10.0;
    inst.dets.push_back(d);
  }
  return inst;
}

SaliencyInstance random_saliency_instance(Rng& rng, std::size_t max_side) {
  SaliencyInstance s;
  const std::size_t h = 1 + rng.below(max_side);
  const std::size_t w = 1 + rng.below(max_side);
  s.heatmap = {h, w, std::vector<float>(h * w)};
  s.mask = {h, w, std::vector<std::uint8_t>(h * w)};
  for (auto& v : s.heatmap.values) v = static_cast<float>(rng.below(9)) / 8.0f;
  for (auto& b : s.mask.values) b = rng.uniform() < 0.4 ? 1 : 0;
  s.mask.values[rng.below(h * w)] = 1;
  return s;
}

}  // namespace oodgate::testing
