#include <cmath>

#include <gtest/gtest.h>

#include "eclipse/dime.hpp"
#include "eclipse/errors.hpp"
#include "test_support.hpp"

using namespace eclipse;
using eclipse::testing::matrix;

namespace {

std::vector<double> scores(const DimensionImportance& u) {
  return {u.scores().begin(), u.scores().end()};
}

std::vector<std::uint32_t> selected(const DimensionMask& m) {
  return {m.selected().begin(), m.selected().end()};
}

// Pool over corpus rows in corpus order, descending fake scores.
CandidatePool pool_over(const EmbeddingMatrix& c) {
  CandidatePool p{"q", {}};
  for (std::size_t i = 0; i < c.size(); ++i) {
    p.entries.push_back({c.id(i), static_cast<double>(c.size() - i)});
  }
  return p;
}

}  // namespace

TEST(PrfCentroid, HandMean) {
  auto c = matrix({"a", "b", "c"}, {{2, 0}, {4, 2}, {9, 9}});
  EXPECT_EQ(prf_centroid(pool_over(c), c, 2), Embedding({3, 1}));
  EXPECT_EQ(prf_centroid(pool_over(c), c, 1), Embedding({2, 0}));
  EXPECT_THROW(prf_centroid(pool_over(c), c, 4), InvalidArgument);
}

TEST(PrfCentroid, IdenticalDocsGiveThatDoc) {
  auto c = matrix({"a", "b", "c"}, {{0.3f, -1.7f}, {0.3f, -1.7f}, {0.3f, -1.7f}});
  EXPECT_EQ(prf_centroid(pool_over(c), c, 3), Embedding({0.3f, -1.7f}));
}

TEST(MoonCentroid, HandMean) {
  auto c = matrix({"a", "b", "c"}, {{9, 9, 9}, {1, 1, 0}, {3, 1, 2}});
  EXPECT_EQ(moon_centroid(pool_over(c), c, 2), Embedding({2, 1, 1}));
  EXPECT_EQ(moon_centroid(pool_over(c), c, 1), Embedding({3, 1, 2}));
  EXPECT_THROW(moon_centroid(pool_over(c), c, 4), InvalidArgument);
}

TEST(MoonCentroid, OppositeVectorsCancel) {
  auto c = matrix({"a", "b", "c"}, {{5, 5}, {1.5f, -2}, {-1.5f, 2}});
  EXPECT_EQ(moon_centroid(pool_over(c), c, 2), Embedding({0, 0}));
}

TEST(MoonCentroid, CopiesOfOneDocument) {
  std::mt19937_64 rng(4);
  auto v = eclipse::testing::random_embedding(rng, 16);
  std::vector<std::vector<float>> rows(6, std::vector<float>(v.values().begin(), v.values().end()));
  auto c = matrix({"a", "b", "c", "d", "e", "f"}, rows);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(moon_centroid(pool_over(c), c, k), v);
}

TEST(PoolCentroid, ExplicitPositions) {
  auto c = matrix({"a", "b", "c"}, {{1, 0}, {3, 0}, {5, 4}});
  const std::vector<std::size_t> pos{2, 0};
  EXPECT_EQ(pool_centroid(pool_over(c), c, pos), Embedding({3, 2}));
  const std::vector<std::size_t> out_of_range{3};
  EXPECT_THROW(pool_centroid(pool_over(c), c, out_of_range), InvalidArgument);
}

TEST(DimeScore, Examples) {
  EXPECT_EQ(scores(dime_score_standard(Embedding({1, 2}), Embedding({3, -1}))),
            (std::vector<double>{3, -2}));
  EXPECT_EQ(scores(dime_score_standard(Embedding({1, 2}), Embedding::zeros(2))),
            (std::vector<double>{0, 0}));
  EXPECT_EQ(scores(dime_score_standard(Embedding({1, 1, 1}), Embedding({0.5f, -2, 7}))),
            (std::vector<double>{0.5, -2, 7}));
  EXPECT_THROW(dime_score_standard(Embedding({1}), Embedding({1, 2})), InvalidArgument);
}

TEST(EclipseScore, Examples) {
  Embedding q({1, 1, 1}), s({2, 0, 1}), m({0, 2, 1});
  EXPECT_EQ(scores(eclipse_score(q, s, m, 1.0, 1.0)), (std::vector<double>{2, -2, 0}));
  const auto u = scores(eclipse_score(q, s, m, 0.5, 0.1));
  const std::vector<double> expect{1.0, -0.2, 0.4};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(u[i], expect[i], 1e-15);
  EXPECT_EQ(scores(eclipse_score(q, s, m, 1.0, 0.0)), scores(dime_score_standard(q, s)));
  EXPECT_THROW(eclipse_score(q, s, Embedding({1}), 1.0, 1.0), InvalidArgument);
}

TEST(RetainedCount, RoundHalfUpWithFloor) {
  EXPECT_EQ(retained_count(0.5, 4), 2u);
  EXPECT_EQ(retained_count(0.001, 4), 1u);
  EXPECT_EQ(retained_count(0.125, 4), 1u);   // 0.5 rounds up
  EXPECT_EQ(retained_count(0.375, 4), 2u);   // 1.5 rounds up
  EXPECT_EQ(retained_count(2.0 / 3.0, 3), 2u);
  EXPECT_EQ(retained_count(0.3, 10), 3u);    // 0.3 * 10 is 2.9999999999999996
  EXPECT_EQ(retained_count(1.0, 128), 128u);
  EXPECT_THROW(retained_count(0.0, 4), InvalidArgument);
  EXPECT_THROW(retained_count(1.5, 4), InvalidArgument);
}

TEST(SelectDimensions, Examples) {
  DimensionImportance u({0.5, 2.0, -1.0, 2.0});
  EXPECT_EQ(selected(select_dimensions(u, 0.5)), (std::vector<std::uint32_t>{1, 3}));
  EXPECT_TRUE(select_dimensions(u, 1.0).is_full());
  EXPECT_EQ(selected(select_dimensions(DimensionImportance({1, 1, 0}), 2.0 / 3.0)),
            (std::vector<std::uint32_t>{0, 1}));
}

TEST(SelectDimensions, TiesGoToLowerIndex) {
  DimensionImportance u({0, 0, 0, 0, 0});
  EXPECT_EQ(selected(select_dimensions(u, 0.4)), (std::vector<std::uint32_t>{0, 1}));
}

TEST(DimeConfig, Validation) {
  DimeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.pool_size = 3;
  c.k_plus = 1;
  c.k_minus = 2;
  EXPECT_THROW(c.validate(), InvalidArgument);  // k_plus must be < 3 - 2
  c.variant = DimeVariant::kLlm;
  EXPECT_NO_THROW(c.validate());
  c.k_minus = 3;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = DimeConfig{};
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = DimeConfig{};
  c.beta = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = DimeConfig{};
  c.retained_fraction = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(DimensionImportance, RejectsNonFinite) {
  EXPECT_THROW(DimensionImportance({1.0, std::nan("")}), InvalidArgument);
}

TEST(Properties, SelectionIsScaleInvariant) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + rng() % 64;
    std::vector<double> u(d), cu(d);
    const double c = std::exp(normal(rng) * 3.0);
    for (std::size_t i = 0; i < d; ++i) {
      // Power-of-two steps keep c * u exact, so ties stay ties.
      u[i] = (t % 2 == 0) ? std::ldexp(double(rng() % 5), -2) : normal(rng);
    }
    const double scale = (t % 2 == 0) ? std::ldexp(1.0, int(rng() % 10) - 5) : c;
    for (std::size_t i = 0; i < d; ++i) cu[i] = scale * u[i];
    for (int f = 1; f <= 10; ++f) {
      EXPECT_EQ(selected(select_dimensions(DimensionImportance(u), f / 10.0)),
                selected(select_dimensions(DimensionImportance(cu), f / 10.0)));
    }
  }
}

TEST(Properties, ResidualFormMatchesWeightedDifference) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> weight(0.05, 3.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + rng() % 64;
    auto q = eclipse::testing::random_embedding(rng, d);
    auto s = eclipse::testing::random_embedding(rng, d);
    auto m = eclipse::testing::random_embedding(rng, d);
    const double a = weight(rng), b = weight(rng);
    const auto u = eclipse_score(q, s, m, a, b);
    for (std::size_t i = 0; i < d; ++i) {
      const double residual = double(q[i]) * (a * s[i] - b * m[i]);
      EXPECT_NEAR(u[i], residual, 1e-6 * std::max(1.0, std::abs(residual)));
    }
  }
}

TEST(Properties, BetaZeroReducesToStandardDime) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng() % 64;
    auto q = eclipse::testing::random_embedding(rng, d, t % 2 == 0);
    auto s = eclipse::testing::random_embedding(rng, d, t % 2 == 0);
    auto m = eclipse::testing::random_embedding(rng, d);
    const auto standard = dime_score_standard(q, s);
    for (double alpha : {0.3, 1.0, 2.5}) {
      const auto ecl = eclipse_score(q, s, m, alpha, 0.0);
      for (int f = 1; f <= 10; ++f) {
        EXPECT_EQ(selected(select_dimensions(ecl, f / 10.0)),
                  selected(select_dimensions(standard, f / 10.0)));
      }
    }
  }
}
