#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oodgate::numerics {

// Embeddings are stored as float32; every reduction accumulates in double.
using FeatureVector = std::vector<float>;

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  std::size_t count = 0;
};

double dot(std::span<const float> u, std::span<const float> v);
double l2_norm(std::span<const float> v);

// u.v / (|u||v|). Throws DimensionError on size mismatch and
// DegenerateVectorError when either operand is empty or all zeros.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

// Same as above for double-valued operands (saliency rasters).
double cosine_similarity(std::span<const double> u, std::span<const double> v);

FeatureVector l2_normalize(std::span<const float> v);

// Also rejects non-finite values with DegenerateVectorError.
void require_finite(std::span<const float> v);

// Median of an even-length input is the mean of the two central values.
SummaryStats summary_stats(std::span<const double> xs);

// (x - min) / (max - min); a constant input maps to 0.5 everywhere.
std::vector<double> minmax_normalize(std::span<const double> xs);

}  // namespace oodgate::numerics
