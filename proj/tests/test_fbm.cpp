#include <gtest/gtest.h>

#include "fns2d/fbm.hpp"
#include "stats_helpers.hpp"

using namespace fns2d;
using fns2d::test::zero_mean_cov;

TEST(Fbm, CovarianceFormula) {
  EXPECT_DOUBLE_EQ(fbm_covariance(1.0, 1.0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(fbm_covariance(2.0, 1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(fgn_autocov(0, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(fgn_autocov(3, 0.5), 0.0);
  EXPECT_NEAR(fgn_autocov(1, 0.75), 0.5 * (std::pow(2.0, 1.5) - 2.0), 1e-15);
}

TEST(Fbm, RejectsBadHurst) {
  EXPECT_THROW(sample_fbm(0.0, 8, 0.1, 1), PreconditionError);
  EXPECT_THROW(sample_fbm(1.0, 8, 0.1, 1), PreconditionError);
  EXPECT_THROW(sample_fbm(0.5, 8, 0.0, 1), PreconditionError);
}

TEST(Fbm, SameSeedIsBitwiseIdentical) {
  FbmPath a = sample_fbm(0.6, 100, 0.01, 42);
  FbmPath b = sample_fbm(0.6, 100, 0.01, 42);
  FbmPath c = sample_fbm(0.6, 100, 0.01, 43);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.values.front(), 0.0);
  EXPECT_EQ(a.steps(), 100u);
}

class FbmLaw : public ::testing::TestWithParam<double> {};

// Empirical E[b(t) b(s)] over replicas against the covariance kernel.
TEST_P(FbmLaw, CovarianceMatchesKernel) {
  const double h = GetParam();
  const std::size_t len = 40, reps = 6000;
  const double dt = 0.05;
  const std::vector<std::pair<std::size_t, std::size_t>> pairs = {{40, 40}, {10, 30}, {1, 40}, {20, 21}, {5, 5}};
  std::vector<std::vector<double>> xs(pairs.size()), ys(pairs.size());
  for (std::size_t r = 0; r < reps; ++r) {
    FbmPath p = sample_fbm(h, len, dt, 1000 + r);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      xs[i].push_back(p.values[pairs[i].first]);
      ys[i].push_back(p.values[pairs[i].second]);
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto c = zero_mean_cov(xs[i], ys[i]);
    double want = fbm_covariance(pairs[i].first * dt, pairs[i].second * dt, h);
    EXPECT_NEAR(c.value, want, 4 * c.se) << "H=" << h << " pair " << i;
  }
}

// a^{-H} b(a t) has the law of b(t): compare Var b(a t) with a^{2H} t^{2H}.
TEST_P(FbmLaw, SelfSimilarity) {
  const double h = GetParam();
  for (double a : {0.5, 3.0}) {
    std::vector<double> x;
    for (std::size_t r = 0; r < 4000; ++r) x.push_back(sample_fbm(h, 16, 0.1 * a, 5000 + r).values[16] / std::pow(a, h));
    auto c = zero_mean_cov(x, x);
    EXPECT_NEAR(c.value, std::pow(1.6, 2 * h), 4 * c.se);
  }
}

INSTANTIATE_TEST_SUITE_P(Hurst, FbmLaw, ::testing::Values(0.3, 0.45, 0.5, 0.6, 0.75, 0.9));

TEST(Fbm, CirculantAndCholeskyAgreeInLaw) {
  const std::size_t len = 12, reps = 20000;
  for (double h : {0.3, 0.75}) {
    FgnSampler circ(h, len), chol(h, len, true);
    ASSERT_TRUE(circ.uses_circulant());
    ASSERT_FALSE(chol.uses_circulant());
    for (const FgnSampler* s : {&circ, &chol}) {
      std::vector<double> x0, x1, x5, y0;
      for (std::size_t r = 0; r < reps; ++r) {
        CounterRng rng(stream_key(7, r));
        std::vector<double> a, b;
        s->sample_pair(rng, a, b);
        x0.push_back(a[0]);
        x1.push_back(a[1]);
        x5.push_back(a[5]);
        y0.push_back(b[0]);
      }
      auto v = zero_mean_cov(x0, x0);
      auto c1 = zero_mean_cov(x0, x1);
      auto c5 = zero_mean_cov(x0, x5);
      auto ab = zero_mean_cov(x0, y0);
      EXPECT_NEAR(v.value, 1.0, 4 * v.se);
      EXPECT_NEAR(c1.value, fgn_autocov(1, h), 4 * c1.se);
      EXPECT_NEAR(c5.value, fgn_autocov(5, h), 4 * c5.se);
      EXPECT_NEAR(ab.value, 0.0, 4 * ab.se);
    }
  }
}

TEST(FbmFamily, PrefixAndDeterminism) {
  FbmFamily small = FbmFamily::uniform(0.6, 4, 32, 0.01, 99);
  FbmFamily big = FbmFamily::uniform(0.6, 8, 32, 0.01, 99);
  for (Wave k : {Wave{1, 0}, Wave{0, 3}, Wave{4, -4}, Wave{2, 1}}) {
    auto [a, b] = small.paths(k);
    auto [c, d] = big.paths(k);
    EXPECT_EQ(a.values, c.values);
    EXPECT_EQ(b.values, d.values);
  }
  EXPECT_THROW(small.paths(Wave{5, 0}), PreconditionError);
  EXPECT_THROW(small.paths(Wave{-1, 0}), PreconditionError);
}

TEST(FbmFamily, ModesAndComponentsUncorrelated) {
  const std::size_t reps = 6000;
  std::vector<double> re1, im1, re2;
  for (std::size_t r = 0; r < reps; ++r) {
    FbmFamily f = FbmFamily::uniform(0.45, 2, 8, 0.1, 300 + r);
    auto [a, b] = f.paths(Wave{1, 0});
    auto [c, d] = f.paths(Wave{1, 1});
    re1.push_back(a.values[8]);
    im1.push_back(b.values[8]);
    re2.push_back(c.values[8]);
  }
  auto ri = zero_mean_cov(re1, im1);
  auto rr = zero_mean_cov(re1, re2);
  auto v = zero_mean_cov(re1, re1);
  EXPECT_NEAR(ri.value, 0.0, 4 * ri.se);
  EXPECT_NEAR(rr.value, 0.0, 4 * rr.se);
  EXPECT_NEAR(v.value, std::pow(0.8, 0.9), 4 * v.se);
}
