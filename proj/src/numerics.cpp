#include "oodgate/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oodgate/errors.hpp"

namespace oodgate::numerics {
namespace {

template <typename T>
void require_same_size(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) {
    throw DimensionError("dimension mismatch: " + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()));
  }
}

template <typename T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
  require_same_size(u, v);
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    uv += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0 || vv == 0.0) {
    throw DegenerateVectorError("cosine similarity of a zero vector");
  }
  const double c = uv / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace

double dot(std::span<const float> u, std::span<const float> v) {
  require_same_size(u, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

double l2_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  return cosine_impl(u, v);
}

double cosine_similarity(std::span<const double> u,
                         std::span<const double> v) {
  return cosine_impl(u, v);
}

void require_finite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw DegenerateVectorError("feature vector contains NaN or Inf");
    }
  }
}

FeatureVector l2_normalize(std::span<const float> v) {
  require_finite(v);
  const double norm = l2_norm(v);
  if (v.empty() || norm == 0.0) {
    throw DegenerateVectorError("cannot normalize a zero vector");
  }
  FeatureVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
  }
  return out;
}

SummaryStats summary_stats(std::span<const double> xs) {
  if (xs.empty()) throw EmptyInputError("summary_stats of an empty sequence");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  // Summing the sorted copy makes the mean independent of input order.
  double sum = 0.0;
  for (double x : sorted) sum += x;
  const std::size_t n = sorted.size();
  SummaryStats s;
  s.count = n;
  s.mean = sum / static_cast<double>(n);
  s.median = n % 2 == 1 ? sorted[n / 2]
                        : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  return s;
}

std::vector<double> minmax_normalize(std::span<const double> xs) {
  if (xs.empty()) throw EmptyInputError("minmax_normalize of an empty sequence");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(xs.size(), 0.5);
  if (hi == lo) return out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = (xs[i] - lo) / (hi - lo);
  }
  return out;
}

}  // namespace oodgate::numerics
