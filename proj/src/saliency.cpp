#include "oodgate/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oodgate/errors.hpp"
#include "oodgate/numerics.hpp"

namespace oodgate::xai {
namespace {

void require_same_shape(const Heatmap& h, const BinaryMask& m) {
  validate(h);
  validate(m);
  if (h.height != m.height || h.width != m.width) {
    throw DimensionError("heatmap is " + std::to_string(h.height) + "x" +
                         std::to_string(h.width) + " but mask is " +
                         std::to_string(m.height) + "x" +
                         std::to_string(m.width));
  }
}

struct Coverage {
  std::size_t p = 0;
  std::size_t n = 0;
};

Coverage top_p_coverage(const Heatmap& h, const BinaryMask& m) {
  Coverage c;
  c.p = static_cast<std::size_t>(
      std::count(m.values.begin(), m.values.end(), std::uint8_t{1}));
  if (c.p == 0) throw EmptyMaskError("mask has no positive pixels");

  std::vector<std::size_t> order(h.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + c.p, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (h.values[a] != h.values[b]) {
                        return h.values[a] > h.values[b];
                      }
                      return a < b;
                    });
  for (std::size_t i = 0; i < c.p; ++i) {
    if (m.values[order[i]] == 1) ++c.n;
  }
  return c;
}

}  // namespace

void validate(const Heatmap& h) {
  if (h.height == 0 || h.width == 0) {
    throw DimensionError("heatmap dimensions must be at least 1x1");
  }
  if (h.values.size() != h.height * h.width) {
    throw DimensionError("heatmap payload size does not match H x W");
  }
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    const float v = h.values[i];
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw FormatError("heatmap value outside [0, 1]", i);
    }
  }
}

void validate(const BinaryMask& m) {
  if (m.height == 0 || m.width == 0) {
    throw DimensionError("mask dimensions must be at least 1x1");
  }
  if (m.values.size() != m.height * m.width) {
    throw DimensionError("mask payload size does not match H x W");
  }
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (m.values[i] > 1) throw FormatError("mask value must be 0 or 1", i);
  }
}

double mgt(const Heatmap& h, const BinaryMask& m) {
  require_same_shape(h, m);
  const Coverage c = top_p_coverage(h, m);
  return static_cast<double>(c.n) / static_cast<double>(c.p);
}

double pcc(const Heatmap& h, const BinaryMask& m, PccMode mode) {
  require_same_shape(h, m);
  std::vector<double> mask(m.values.begin(), m.values.end());
  std::vector<double> heat(h.values.begin(), h.values.end());
  if (mode == PccMode::Centered) {
    const double n = static_cast<double>(mask.size());
    const double mask_mean = std::accumulate(mask.begin(), mask.end(), 0.0) / n;
    const double heat_mean = std::accumulate(heat.begin(), heat.end(), 0.0) / n;
    for (auto& v : mask) v -= mask_mean;
    for (auto& v : heat) v -= heat_mean;
  }
  return numerics::cosine_similarity(std::span<const double>(mask),
                                     std::span<const double>(heat));
}

double rmse(const Heatmap& h, const BinaryMask& m) {
  require_same_shape(h, m);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    const double d =
        static_cast<double>(m.values[i]) - static_cast<double>(h.values[i]);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(h.values.size()));
}

PairScore score_pair(const Heatmap& h, const BinaryMask& m, PccMode mode) {
  require_same_shape(h, m);
  const Coverage c = top_p_coverage(h, m);
  PairScore s;
  s.p = c.p;
  s.n = c.n;
  s.mgt = static_cast<double>(c.n) / static_cast<double>(c.p);
  s.pcc = pcc(h, m, mode);
  s.rmse = rmse(h, m);
  return s;
}

XaiEvaluation evaluate_xai(const std::vector<SaliencyPair>& pairs,
                           PccMode mode) {
  XaiEvaluation out;
  std::map<std::string, std::size_t> excluded_per_tag;
  for (const auto& pair : pairs) {
    PairScore s;
    try {
      s = score_pair(pair.heatmap, pair.mask, mode);
    } catch (const Error& e) {
      out.exclusions.push_back(
          {pair.id, pair.model_tag, std::string(to_string(e.kind())) + ": " + e.what()});
      ++excluded_per_tag[pair.model_tag];
      continue;
    }
    XaiScore& agg = out.per_tag[pair.model_tag];
    agg.mgt += s.mgt;
    agg.pcc += s.pcc;
    agg.rmse += s.rmse;
    agg.p += s.p;
    agg.n += s.n;
    ++agg.pairs;
  }
  if (out.per_tag.empty()) {
    throw NoSamplesError("no valid heatmap/mask pairs to evaluate");
  }
  for (auto& [tag, agg] : out.per_tag) {
    const double k = static_cast<double>(agg.pairs);
    agg.mgt /= k;
    agg.pcc /= k;
    agg.rmse /= k;
    if (auto it = excluded_per_tag.find(tag); it != excluded_per_tag.end()) {
      agg.excluded = it->second;
    }
  }
  return out;
}

}  // namespace oodgate::xai
