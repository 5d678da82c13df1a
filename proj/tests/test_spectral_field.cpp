#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "fns2d/field_io.hpp"
#include "fns2d/physical.hpp"
#include "helpers.hpp"

using namespace fns2d;
using fns2d::test::max_abs_diff;
using fns2d::test::random_field;

TEST(FourierField, RealityIsEnforcedOnLowerHalf) {
  FourierField v(3);
  v.set({-1, 2}, cplx(0.5, -0.25));
  EXPECT_EQ(v[Wave(1, -2)], cplx(-0.5, -0.25));
  EXPECT_EQ(v[Wave(-1, 2)], cplx(0.5, -0.25));
  EXPECT_EQ(v[Wave(0, 0)], cplx{});
  EXPECT_EQ(v[Wave(4, 0)], cplx{});
  EXPECT_THROW(v.set(Wave(4, 0), 1.0), PreconditionError);
  EXPECT_THROW(v.set(Wave(0, 0), 1.0), PreconditionError);
  EXPECT_EQ(v.mode_count(), 24u);
}

TEST(FourierField, SobolevNormHandValue) {
  FourierField v(2);
  v.set({1, 0}, 1.0);
  v.set({1, 1}, cplx(0.0, 2.0));
  // 2 * (1 + 4 * 2^r) summed over +-k
  EXPECT_DOUBLE_EQ(sobolev_norm(v, 1.0) * sobolev_norm(v, 1.0), 18.0);
  EXPECT_DOUBLE_EQ(sobolev_norm(v, 0.0) * sobolev_norm(v, 0.0), 10.0);
  EXPECT_DOUBLE_EQ(dissipation(v), 18.0);
}

TEST(FourierField, SobolevNormMonotoneInOrder) {
  FourierField v = random_field(12, 3);
  double prev = 0.0;
  for (double r = -2.0; r <= 2.0; r += 0.125) {
    double n = sobolev_norm(v, r);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(FourierField, SingleModeVelocity) {
  FourierField v(1);
  const double a = 0.7;
  v.set({1, 0}, a);
  const int m = 8;
  VectorGrid g = to_physical(v, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double x1 = 2 * std::numbers::pi * i / m;
      EXPECT_NEAR(g.u1[g.at(i, j)], 0.0, 1e-15);
      EXPECT_NEAR(g.u2[g.at(i, j)], a / std::numbers::pi * std::cos(x1), 1e-15);
    }
}

TEST(FourierField, RoundTripAndParseval) {
  for (int n : {4, 8, 16}) {
    FourierField v = random_field(n, 10 + n);
    for (int m : {2 * n + 2, smooth_size(3 * n + 1), 4 * n}) {
      VectorGrid g = to_physical(v, m);
      FourierField w = from_physical(g, n);
      EXPECT_LT(max_abs_diff(v, w), 1e-13) << "n=" << n << " m=" << m;
      double l2 = sobolev_norm(v, 0.0);
      EXPECT_NEAR(grid_l2_squared(g), l2 * l2, 1e-12 * l2 * l2);
    }
  }
}

TEST(FourierField, GridTooCoarseIsAliasingError) {
  FourierField v = random_field(8, 1);
  EXPECT_THROW(to_physical(v, 17), AliasingError);
  EXPECT_NO_THROW(to_physical(v, 18));
  VectorGrid g(17);
  EXPECT_THROW(from_physical(g, 8), AliasingError);
}

TEST(FourierField, GradientFieldProjectsToZero) {
  // u = grad(sin(x1) cos(2 x2) + cos(3 x1 + x2))
  const int m = 24;
  VectorGrid g(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double x = 2 * std::numbers::pi * i / m, y = 2 * std::numbers::pi * j / m;
      g.u1[g.at(i, j)] = std::cos(x) * std::cos(2 * y) - 3 * std::sin(3 * x + y);
      g.u2[g.at(i, j)] = -2 * std::sin(x) * std::sin(2 * y) - std::sin(3 * x + y);
    }
  FourierField p = from_physical(g, 5);
  EXPECT_LT(sobolev_norm(p, 0.0), 1e-13);
}

TEST(FourierField, ProjectionOutputIsDivergenceFree) {
  const int m = 20;
  VectorGrid g(m);
  CounterRng rng(5);
  for (std::size_t i = 0; i < g.u1.size(); ++i) {
    g.u1[i] = rng.normal();
    g.u2[i] = rng.normal();
  }
  FourierField p = from_physical(g, 6);
  // Spectral divergence of the projected velocity, via its physical coefficients.
  VectorGrid u = to_physical(p, m);
  FourierField again = from_physical(u, 6);
  EXPECT_LT(max_abs_diff(p, again), 1e-13);
  double div = 0.0;
  for (int k1 = -6; k1 <= 6; ++k1)
    for (int k2 = -6; k2 <= 6; ++k2) {
      Wave k{k1, k2};
      if (k.is_zero()) continue;
      auto [a, b] = detail::velocity_coeffs(p, k);
      div = std::max(div, std::abs(a * double(k1) + b * double(k2)));
    }
  EXPECT_LT(div, 1e-16);
}

TEST(FourierField, DyadicShells) {
  EXPECT_EQ(dyadic_shell(Wave(1, 0)), 0);
  EXPECT_EQ(dyadic_shell(Wave(1, 1)), 0);
  EXPECT_EQ(dyadic_shell(Wave(2, 0)), 1);
  EXPECT_EQ(dyadic_shell(Wave(3, 3)), 2);
  EXPECT_EQ(dyadic_shell(Wave(4, 0)), 2);
}

TEST(FourierField, BesovSobolevConsistencyAtP2) {
  for (double s : {-1.5, -0.5, 0.0, 0.4, 1.0, 2.0}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      FourierField v = random_field(16, seed, 0.3);
      double ratio = besov_norm(v, s, 2.0, 2.0) / sobolev_norm(v, s);
      double lo = std::min(1.0, std::pow(2.0, -s)), hi = std::max(1.0, std::pow(2.0, -s));
      EXPECT_GE(ratio, lo * (1 - 1e-12)) << "s=" << s;
      EXPECT_LE(ratio, hi * (1 + 1e-12)) << "s=" << s;
    }
  }
}

TEST(FourierField, BesovGridL2MatchesParseval) {
  // The p = 2 shortcut and the grid route must agree.
  FourierField v = random_field(8, 9);
  VectorGrid g = to_physical(v, 18);
  EXPECT_NEAR(grid_lp_norm(g, 2.0), sobolev_norm(v, 0.0), 1e-12);
  EXPECT_GT(besov_norm(v, 0.3, 4.0, 2.0), 0.0);
  EXPECT_GE(besov_norm(v, 0.3, 2.0, 1.0), besov_norm(v, 0.3, 2.0, 2.0));
  EXPECT_THROW(besov_norm(v, 0.3, 0.5, 2.0), PreconditionError);
}

TEST(HeatSemigroup, SemigroupLaw) {
  FourierField v = random_field(10, 4);
  for (auto [s, t] : {std::pair{0.01, 0.02}, {0.1, 0.3}, {1e-4, 0.5}}) {
    FourierField a = heat_semigroup(heat_semigroup(v, s), t);
    FourierField b = heat_semigroup(v, s + t);
    // Rounding of the exponent x*s costs x*s ulps of relative accuracy.
    a.for_each_upper([&](Wave k, cplx c) {
      cplx d = b.at_upper(k);
      double ulps = 4.0 + 2.0 * static_cast<double>(k.norm2()) * (s + t);
      EXPECT_LE(std::abs(c - d), ulps * std::numeric_limits<double>::epsilon() * std::abs(d));
    });
  }
  EXPECT_EQ(heat_semigroup(v, 0.0), v);
  EXPECT_THROW(heat_semigroup(v, -1e-3), PreconditionError);
}

TEST(HeatSemigroup, SmoothingEstimate) {
  // ||e^{tA} v||_{s1} <= C t^{-(s1-s2)/2} ||v||_{s2} with C = (a/2e)^{a/2}, a = s1 - s2.
  for (auto [s1, s2] : {std::pair{1.0, 0.0}, {0.4, -0.5}, {2.0, -1.0}}) {
    double a = s1 - s2;
    double bound = std::pow(a / (2 * std::numbers::e), a / 2);
    double fitted = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      FourierField v = random_field(24, seed, 0.0);
      for (double t : {1e-3, 1e-2, 0.1, 1.0}) {
        double c = sobolev_norm(heat_semigroup(v, t), s1) * std::pow(t, a / 2) / sobolev_norm(v, s2);
        fitted = std::max(fitted, c);
      }
    }
    EXPECT_LE(fitted, bound * (1 + 1e-12));
    EXPECT_GT(fitted, 0.2 * bound);
  }
}

TEST(FieldCsv, RoundTripIsBitExact) {
  FourierField v = random_field(6, 12);
  v.set({1, 1}, cplx(1.0 / 3.0, -std::numbers::pi));
  std::stringstream ss;
  write_field(ss, v, "manifest seed=1");
  std::string text = ss.str();
  EXPECT_EQ(text.rfind("# fns2d-field v1 cutoff=6\n", 0), 0u);
  FourierField w = read_field(ss);
  EXPECT_EQ(v, w);
  std::stringstream again;
  write_field(again, w, "manifest seed=1");
  EXPECT_EQ(again.str(), text);
}

TEST(FieldCsv, RejectsLowerHalfRows) {
  std::stringstream ss("# fns2d-field v1 cutoff=2\nk1,k2,re,im\n0,-1,1,0\n");
  EXPECT_THROW(read_field(ss), PreconditionError);
}
