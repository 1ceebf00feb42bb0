#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "oodgate/errors.hpp"
#include "oodgate/numerics.hpp"

namespace oodgate::numerics {
namespace {

using V = std::vector<float>;

TEST(Cosine, IdenticalOrthogonalAndDiagonal) {
  EXPECT_NEAR(cosine_similarity(V{0.6f, 0.8f}, V{0.6f, 0.8f}), 1.0, 1e-12);
  EXPECT_NEAR(cosine_similarity(V{1, 0}, V{0, 1}), 0.0, 1e-12);
  EXPECT_NEAR(cosine_similarity(V{1, 1, 0}, V{1, 0, 0}), 1.0 / std::sqrt(2.0), 1e-5);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine_similarity(V{1, 0}, V{1, 0, 0}), DimensionError);
  EXPECT_THROW(cosine_similarity(V{0, 0}, V{1, 0}), DegenerateVectorError);
  EXPECT_THROW(cosine_similarity(V{}, V{}), DegenerateVectorError);
}

TEST(Cosine, ScaleInvariantAndBounded) {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + rng.below(12);
    V u(dim), v(dim);
    for (auto& x : u) x = static_cast<float>(rng.normal());
    for (auto& x : v) x = static_cast<float>(rng.normal());
    const double base = cosine_similarity(u, v);
    ASSERT_GE(base, -1.0);
    ASSERT_LE(base, 1.0);
    EXPECT_NEAR(base, cosine_similarity(v, u), 1e-12);
    const float a = static_cast<float>(rng.uniform(0.1, 10.0));
    V scaled = u;
    for (auto& x : scaled) x *= a;
    EXPECT_NEAR(cosine_similarity(scaled, v), base, 1e-6);
  }
}

TEST(Normalize, Examples) {
  const auto v = l2_normalize(V{3, 4});
  EXPECT_NEAR(v[0], 0.6, 1e-7);
  EXPECT_NEAR(v[1], 0.8, 1e-7);
  EXPECT_EQ(l2_normalize(V{1, 0, 0}), (V{1, 0, 0}));
  EXPECT_THROW(l2_normalize(V{0, 0}), DegenerateVectorError);
  EXPECT_THROW(l2_normalize(V{1, NAN}), DegenerateVectorError);
}

TEST(Normalize, UnitNormAndIdempotent) {
  testing::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    V u(1 + rng.below(64));
    for (auto& x : u) x = static_cast<float>(rng.uniform(-100, 100));
    const auto once = l2_normalize(u);
    EXPECT_NEAR(l2_norm(once), 1.0, 1e-6);
    const auto twice = l2_normalize(once);
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(once[i], twice[i], 1e-7);
  }
}

// Backbone table columns as published.
const std::vector<double> kFlops = {1.8, 3.6,  4.1, 7.9, 11.6, 15.5,
                                    19.6, 5.7, 2.9, 3.4, 0.39, 37};
const std::vector<double> kParams = {11.7, 21.8, 25.6, 44.5, 60.2, 138.4,
                                     143.7, 23.9, 8.0, 14.1, 5.3, 66};

TEST(SummaryStats, TableColumns) {
  const auto flops = summary_stats(kFlops);
  EXPECT_NEAR(flops.mean, 9.46, 0.005);
  EXPECT_NEAR(flops.median, 4.9, 1e-12);
  EXPECT_EQ(flops.count, 12u);
  const auto params = summary_stats(kParams);
  EXPECT_NEAR(params.median, 24.75, 1e-12);
  EXPECT_NEAR(params.mean, 563.2 / 12.0, 1e-9);
}

TEST(SummaryStats, SingletonAndEmpty) {
  const auto s = summary_stats(std::vector<double>{5});
  EXPECT_EQ(s.mean, 5);
  EXPECT_EQ(s.median, 5);
  EXPECT_THROW(summary_stats(std::vector<double>{}), EmptyInputError);
}

TEST(SummaryStats, PermutationInvariant) {
  testing::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(1 + rng.below(30));
    for (auto& x : xs) x = rng.uniform(-1e3, 1e3);
    const auto a = summary_stats(xs);
    for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[rng.below(i)]);
    const auto b = summary_stats(xs);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.median, b.median);
  }
}

TEST(MinMax, Examples) {
  EXPECT_EQ(minmax_normalize(std::vector<double>{0, 5, 10}), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(minmax_normalize(std::vector<double>{7, 7, 7}), (std::vector<double>{0.5, 0.5, 0.5}));
  const auto r = minmax_normalize(std::vector<double>{2, 4, 8});
  EXPECT_NEAR(r[0], 0.0, 1e-15);
  EXPECT_NEAR(r[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r[2], 1.0, 1e-15);
  EXPECT_THROW(minmax_normalize(std::vector<double>{}), EmptyInputError);
}

TEST(MinMax, AffineRescaleInvariant) {
  testing::Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(2 + rng.below(10));
    for (auto& x : xs) x = rng.uniform(-50, 50);
    const double a = rng.uniform(0.1, 20), b = rng.uniform(-100, 100);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(a * x + b);
    const auto nx = minmax_normalize(xs), ny = minmax_normalize(ys);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_GE(nx[i], 0.0);
      EXPECT_LE(nx[i], 1.0);
      EXPECT_NEAR(nx[i], ny[i], 1e-9);
    }
  }
}

}  // namespace
}  // namespace oodgate::numerics
