#include <gtest/gtest.h>

#include "fns2d/series.hpp"

using namespace fns2d;

TEST(Classify, GeometricAndHarmonicSums) {
  std::vector<double> n = {8, 16, 32, 64}, conv, div;
  for (double x : n) {
    conv.push_back(2.0 - 1.0 / x);
    div.push_back(std::log(x) + x * 0.01);
  }
  EXPECT_TRUE(classify_partial_sums(n, conv).converged);
  EXPECT_FALSE(classify_partial_sums(n, div).converged);
  EXPECT_THROW(classify_partial_sums({8, 16}, {1, 2}), PreconditionError);
}

TEST(ZSeries, HandValueAtCutoffOne) {
  const double h = 0.6, r = 0.3;
  EXPECT_NEAR(z_series(h, r, 1), 2 * ch_cached(h) * (4 + 4 * std::pow(2.0, r - 2 * h)), 1e-14);
}

TEST(ZSeries, VerdictBracketsThreshold) {
  for (double h : {0.45, 0.5, 0.6, 0.75}) {
    double rs = z_regularity_threshold(h);
    auto rows = z_regularity_report(h, {rs - 0.01, rs + 0.01}, {64, 128, 256, 512}, 0, 1);
    EXPECT_TRUE(rows.front().converged) << "H=" << h;
    EXPECT_FALSE(rows.back().converged) << "H=" << h;
  }
}

TEST(ZSeries, MonteCarloMatchesSeries) {
  auto rows = z_regularity_report(0.6, {-0.5, 0.1}, {2, 3, 4}, 300, 9);
  for (auto& row : rows) EXPECT_TRUE(row.mc.within(row.series_value, 4)) << row.r << " " << row.cutoff;
}

TEST(S1, TailBoundCoversDoubling) {
  for (double h : {0.3, 0.4, 0.75}) {
    Wave k{5, 2};
    SeriesValue a = s1_sum(k, h, 60), b = s1_sum(k, h, 120);
    EXPECT_GT(b.value, a.value);
    EXPECT_LE(b.value - a.value, a.tail_bound) << "H=" << h;
  }
  EXPECT_THROW(s1_sum(Wave{1, 0}, 0.25, 10), PreconditionError);
}

TEST(S2, TailBoundCoversDoubling) {
  Wave k{3, 3};
  SeriesValue a = s2_sum(k, 0.75, -0.75, 60), b = s2_sum(k, 0.75, -0.75, 120);
  EXPECT_LE(b.value - a.value, a.tail_bound);
  EXPECT_THROW(s2_sum(k, 0.75, -0.4, 10), PreconditionError);
  EXPECT_THROW(s2_sum(k, 0.45, -1.2, 10), PreconditionError);
}

TEST(S1, SlopeAtLargeHurst) {
  SlopeFit f = fit_slope([](Wave k) { return s1_sum(k, 0.75, 512).value; }, -s1_exponent(0.75));
  EXPECT_NEAR(f.slope, f.expected, 0.15);
}

TEST(S3, FftMatchesBruteForce) {
  for (auto [h, rho] : {std::pair{0.75, -0.75}, {0.45, -1.3}}) {
    double brute = s3_brute(h, rho, 3), fast = s3_sum(h, rho, 3);
    EXPECT_NEAR(fast, brute, 1e-12 * brute) << "H=" << h;
  }
}

TEST(S3, TermSymmetry) {
  Wave j{2, 1}, h{-1, 3}, l{4, -2};
  EXPECT_EQ(s3_term(j, h, l, 0.75, -0.75), s3_term(j, l, h, 0.75, -0.75));
  EXPECT_EQ(s3_term(j, h, h, 0.75, -0.75), 0.0);
}

TEST(S3, AdmissibleWindow) {
  EXPECT_TRUE(s3_admissible(0.75, -0.75));
  EXPECT_TRUE(s3_admissible(0.45, -1.3));
  EXPECT_FALSE(s3_admissible(0.45, -1.1));
  EXPECT_FALSE(s3_admissible(0.75, -0.4));
  EXPECT_THROW(s3_sum(0.75, -0.4, 4), PreconditionError);
  EXPECT_THROW(s3_sum(0.75, -0.75, 25), PreconditionError);
}

TEST(BzzScan, PartialSumsAtLargeHurstSettle) {
  BzzSeriesScan s = bzz_series_scan(0.75, -0.75, {8, 16, 32, 64});
  EXPECT_TRUE(s.verdict.converged);
  for (std::size_t i = 1; i < s.verdict.relative_changes.size(); ++i)
    EXPECT_LT(s.verdict.relative_changes[i], s.verdict.relative_changes[i - 1]);
}

// Just past the threshold the partial sums are still pre-asymptotic at N=64.
TEST(BzzScan, PartialSumsResolveFarFromThreshold) {
  EXPECT_TRUE(bzz_series_scan(0.45, -1.6, {8, 16, 32, 64}).verdict.converged);
  EXPECT_FALSE(bzz_series_scan(0.45, -1.0, {8, 16, 32, 64}).verdict.converged);
}

TEST(BzzTail, SummandExponentMatchesScaling) {
  // E|B_k|^2 ~ |k|^{4-8H} for H < 1/2 and |k|^{2-4H} for H > 1/2.
  EXPECT_NEAR(bzz_tail_exponent(0.3, -2.0).summand_exponent, 4.0 - 8 * 0.3, 0.05);
  EXPECT_NEAR(bzz_tail_exponent(0.45, -2.0).summand_exponent, 4.0 - 8 * 0.45, 0.1);
  EXPECT_NEAR(bzz_tail_exponent(0.75, -2.0).summand_exponent, 2.0 - 4 * 0.75, 0.05);
}

TEST(BzzTail, BracketsThreshold) {
  EXPECT_TRUE(bzz_tail_exponent(0.45, -1.3).converged);
  EXPECT_FALSE(bzz_tail_exponent(0.45, -1.0).converged);
  EXPECT_TRUE(bzz_tail_exponent(0.75, -0.75).converged);
  EXPECT_FALSE(bzz_tail_exponent(0.75, -0.4).converged);
}
