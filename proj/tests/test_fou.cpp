#include <gtest/gtest.h>

#include <numeric>

#include "fns2d/fou.hpp"

using namespace fns2d;

// Oracle: the double integral has the closed form Gamma(2H+1)/2.
static double ch_closed_form(double h) { return 0.5 * std::tgamma(2 * h + 1); }

TEST(ChConstant, MatchesClosedForm) {
  for (double h : {0.05, 0.26, 0.3, 0.45, 0.5, 0.6, 0.75, 0.9, 0.97}) {
    ChConstant c = compute_ch(h);
    EXPECT_LE(c.error, 1e-6);
    EXPECT_NEAR(c.value, ch_closed_form(h), 1e-8) << "H=" << h;
  }
  EXPECT_NEAR(compute_ch(0.5).value, 0.5, 1e-9);
}

TEST(ChConstant, RejectsBadInput) {
  EXPECT_THROW(compute_ch(1.0), PreconditionError);
  EXPECT_THROW(compute_ch(0.5, 0.0), PreconditionError);
  EXPECT_THROW(compute_ch(0.5, 1e-18), NumericalError);
}

TEST(Fou, StepWeightSeries) {
  EXPECT_DOUBLE_EQ(phi1(0.0), 1.0);
  EXPECT_NEAR(phi1(1e-6), -std::expm1(-1e-6) / 1e-6, 1e-15);
  EXPECT_NEAR(phi1(0.25), (1 - std::exp(-0.25)) / 0.25, 1e-15);
}

// With b linear in time, two steps of d1 and d2 equal one step of d1 + d2.
TEST(Fou, StepsComposeForLinearDriver) {
  const double lam = 3.0, slope = 1.7, z0 = 0.4;
  for (auto [d1, d2] : {std::pair{0.01, 0.03}, {0.05, 0.02}, {1e-4, 0.08}}) {
    double two = std::exp(-lam * d2) * (std::exp(-lam * d1) * z0 + phi1(lam * d1) * slope * d1) +
                 phi1(lam * d2) * slope * d2;
    double one = std::exp(-lam * (d1 + d2)) * z0 + phi1(lam * (d1 + d2)) * slope * (d1 + d2);
    EXPECT_NEAR(two, one, 4e-16);
  }
}

TEST(Fou, RecursionMatchesConvolutionForSmoothDriver) {
  // b(s) = s^2 on [-2, 1]: z(1) = int e^{-lam(1-s)} 2 s ds, closed form.
  const double lam = 2.0, d = 1e-3;
  FbmPath p{-2.0, d, {}};
  for (int i = 0; i <= 3000; ++i) {
    double s = -2.0 + i * d;
    p.values.push_back(s * s - 4.0);
  }
  auto prim = [&](double s) { return std::exp(lam * s) * (2 * s / lam - 2 / (lam * lam)); };
  double want = std::exp(-lam) * (prim(1.0) - prim(-2.0));
  FouSamples o = sample_fou_path({lam, 0.5}, p, {1.0});
  EXPECT_NEAR(o.values[0], want, 1e-6);
}

TEST(Fou, CoarseStepAndOffGridTimesRejected) {
  FbmPath p = sample_fbm(0.6, 100, 0.1, 3);
  EXPECT_THROW(sample_fou_path({4.0, 0.6}, p, {1.0}), PreconditionError);
  EXPECT_THROW(sample_fou_path({1.0, 0.6}, p, {0.05}), PreconditionError);
  EXPECT_THROW(sample_fou_path({1.0, 0.6}, p, {20.0}), PreconditionError);
}

TEST(Fou, ShortBurnInWarns) {
  FbmPath p = sample_fbm(0.6, 300, 0.1, 3);
  p.t0 = -2.0;
  FouSamples o = sample_fou_path({1.0, 0.6}, p, {0.0, 1.0});
  EXPECT_FALSE(o.warning.empty());
  EXPECT_NEAR(o.dropped_past, std::exp(-4.0), 1e-15);
  p.t0 = -20.0;
  EXPECT_TRUE(sample_fou_path({1.0, 0.6}, p, {0.0}).warning.empty());
}

TEST(Fou, StationaryVariance) {
  for (double lam : {1.0, 4.0, 9.0})
    for (double h : {0.45, 0.6, 0.75}) {
      FouVarianceCheck c = fou_variance_check(lam, h, 4000, 11);
      EXPECT_TRUE(c.pass) << "lambda=" << lam << " H=" << h << " var=" << c.empirical.value << " +- "
                          << c.empirical.se << " theory=" << c.theory;
    }
}

// z(0) at rate lambda has the law of lambda^{-H} int_0^inf e^{-r} db(r),
// the latter computed by parts on an independent fBm path.
TEST(Fou, LawMatchesRescaledIntegral) {
  const double lam = 4.0, h = 0.6;
  std::vector<double> a = fou_stationary_samples(lam, h, 3000, 21);
  const double T = 30.0, d = 1.0 / 32;
  const auto steps = static_cast<std::size_t>(T / d);
  FgnSampler s(h, steps);
  std::vector<double> b;
  std::vector<double> x, y;
  for (std::size_t r = 0; r < 1500; ++r) {
    CounterRng rng(stream_key(77, r));
    s.sample_pair(rng, x, y);
    for (auto* inc : {&x, &y}) {
      FbmPath p = fbm_from_increments(*inc, h, 0.0, d);
      double integral = 0.0;
      for (std::size_t i = 0; i < steps; ++i)
        integral += 0.5 * d * (std::exp(-static_cast<double>(i) * d) * p.values[i] + std::exp(-(i + 1.0) * d) * p.values[i + 1]);
      b.push_back(std::pow(lam, -h) * (std::exp(-T) * p.values[steps] + integral));
    }
  }
  KsResult ks = ks_two_sample(a, b);
  EXPECT_GT(ks.p_value, 0.01) << "D=" << ks.statistic;
}

TEST(Fou, GaussianShape) {
  std::vector<double> a = fou_stationary_samples(1.0, 0.45, 8000, 5);
  Shape s = shape(a);
  EXPECT_LT(std::abs(s.skewness), 4 * std::sqrt(6.0 / 8000));
  EXPECT_LT(std::abs(s.excess_kurtosis), 4 * std::sqrt(24.0 / 8000));
}

TEST(StokesLayout, GridContainsSolverTimes) {
  auto layout = stokes_layout(0.01, 0.5);
  for (Wave k : {Wave{1, 0}, Wave{3, 4}, Wave{16, 16}}) {
    ModeGrid g = layout(k);
    EXPECT_LE(k.norm2() * g.dt, kMaxRateStep);
    EXPECT_LE(g.t0, -FouParams{double(k.norm2())}.burn_in() + 1e-12);
    double ratio = 0.01 / g.dt;
    EXPECT_EQ(ratio, std::round(ratio));
    EXPECT_NEAR(g.t0 + g.dt * g.steps, 0.5, 1e-12);
  }
}

struct ZeroFamily {
  int n;
  int cutoff() const { return n; }
  double hurst() const { return 0.6; }
  std::pair<FbmPath, FbmPath> paths(Wave) const {
    FbmPath p{-20.0, 0.001, std::vector<double>(21001, 0.0)};
    return {p, p};
  }
};

TEST(ZField, ZeroDriverGivesZeroField) {
  Trajectory z = sample_z_field(ZeroFamily{2}, uniform_times(0.1, 10));
  for (auto& f : z.fields) EXPECT_EQ(sobolev_norm(f, 0.0), 0.0);
}

TEST(ZField, DeterministicAndPrefix) {
  auto times = uniform_times(0.05, 4);
  Trajectory a = sample_z_field(stokes_family(0.6, 3, 0.05, 0.2, 8), times);
  Trajectory b = sample_z_field(stokes_family(0.6, 3, 0.05, 0.2, 8), times);
  Trajectory c = sample_z_field(stokes_family(0.6, 5, 0.05, 0.2, 8), times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(a.fields[i], b.fields[i]);
    EXPECT_EQ(a.fields[i], c.fields[i].with_cutoff(3));
  }
}

// Sampling the family at dt/2 and reading every other time equals sampling at dt
// when both use the same family.
TEST(ZField, SubsampledGridsShareTheRealisation) {
  FbmFamily fam = stokes_family(0.75, 4, 0.025, 0.2, 2);
  Trajectory fine = sample_z_field(fam, uniform_times(0.025, 8));
  Trajectory coarse = sample_z_field(fam, uniform_times(0.05, 4));
  for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_EQ(coarse.fields[i], fine.fields[2 * i]);
}

TEST(ZField, ModeVarianceIsStationary) {
  // E|z_k(t)|^2 = 2 C_H |k|^{-4H} at every t.
  const double h = 0.6;
  std::vector<double> x;
  for (std::uint64_t r = 0; r < 600; ++r) {
    Trajectory z = sample_z_field(stokes_family(h, 1, 0.1, 0.1, 1000 + r), {0.0, 0.1});
    for (auto& f : z.fields) {
      x.push_back(f.at_upper(Wave{1, 1}).real());
      x.push_back(f.at_upper(Wave{1, 1}).imag());
    }
  }
  Estimate v = variance_se(x);
  // Pairs of draws are correlated in time, so widen by sqrt(2).
  EXPECT_NEAR(v.value, ch_closed_form(h) * std::pow(2.0, -2 * h), 4 * std::sqrt(2.0) * v.se);
}
