#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oodgate::xai {

// Row-major H x W saliency raster with values in [0, 1].
struct Heatmap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;

  float at(std::size_t row, std::size_t col) const {
    return values[row * width + col];
  }
};

// Row-major H x W ground-truth mask with values in {0, 1}.
struct BinaryMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> values;
};

// Throws FormatError (offset = pixel index) when a value is non-finite or
// outside [0, 1], DimensionError when the payload size disagrees with H x W.
void validate(const Heatmap& h);
void validate(const BinaryMask& m);

enum class PccMode {
  Uncentered,  // u1.u2 / (|u1||u2|) on the flattened rasters
  Centered,    // classical Pearson: the same after subtracting each mean
};

// Fraction n/p of the p mask-positive pixels covered by the p highest
// heatmap pixels. Ties in heatmap value go to the lower row-major index.
double mgt(const Heatmap& h, const BinaryMask& m);

double pcc(const Heatmap& h, const BinaryMask& m,
           PccMode mode = PccMode::Uncentered);

double rmse(const Heatmap& h, const BinaryMask& m);

struct PairScore {
  double mgt = 0.0;
  double pcc = 0.0;
  double rmse = 0.0;
  std::size_t p = 0;  // mask-positive pixel count
  std::size_t n = 0;  // top-p heatmap pixels landing on the mask
};

PairScore score_pair(const Heatmap& h, const BinaryMask& m,
                     PccMode mode = PccMode::Uncentered);

struct SaliencyPair {
  std::string id;
  std::string model_tag;
  Heatmap heatmap;
  BinaryMask mask;
};

struct XaiScore {
  double mgt = 0.0;
  double pcc = 0.0;
  double rmse = 0.0;
  std::size_t p = 0;  // summed over included pairs
  std::size_t n = 0;
  std::size_t pairs = 0;
  std::size_t excluded = 0;
};

struct Exclusion {
  std::string id;
  std::string model_tag;
  std::string reason;
};

struct XaiEvaluation {
  std::map<std::string, XaiScore> per_tag;  // keyed by model tag
  std::vector<Exclusion> exclusions;        // in input order
};

// Per-pair scores averaged per model tag. Pairs violating a metric
// precondition are excluded and listed; throws NoSamplesError when nothing
// survives.
XaiEvaluation evaluate_xai(const std::vector<SaliencyPair>& pairs,
                           PccMode mode = PccMode::Uncentered);

}  // namespace oodgate::xai
