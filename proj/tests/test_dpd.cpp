#include <gtest/gtest.h>

#include <cmath>

#include "fns2d/dpd.hpp"
#include "fns2d/fou.hpp"
#include "helpers.hpp"

using namespace fns2d;

TEST(Conditions, SamplePointSatisfiesAll) {
  for (double c : {1.0 / 32, 1.0 / 64, 0.05}) {
    ConditionVerdict v = check_parameter_conditions(7.0 / 16 + c, sample_point(7.0 / 16 + c));
    EXPECT_TRUE(v.ok()) << "c=" << c;
  }
  LocalParams x = sample_point(7.0 / 16 + 1.0 / 32);
  EXPECT_DOUBLE_EQ(x.alpha, 3.0 / 16);
  EXPECT_DOUBLE_EQ(x.sigma, -5.0 / 32);
  EXPECT_DOUBLE_EQ(2.0 / x.beta, 3.0 / 8);
  EXPECT_DOUBLE_EQ(2.0 / x.p, 7.0 / 32);
}

TEST(Conditions, NonnegativeSigmaViolatesNine) {
  LocalParams x = sample_point(0.47);
  x.sigma = 0.0;
  ConditionVerdict v = check_parameter_conditions(0.47, x);
  EXPECT_NE(std::find(v.violated.begin(), v.violated.end(), 9), v.violated.end());
}

TEST(Conditions, EachConditionCanFailAlone) {
  const double h = 0.47;
  LocalParams base = sample_point(h);
  LocalParams x = base;
  x.beta = x.q - 0.1;
  auto v = check_parameter_conditions(h, x);
  EXPECT_NE(std::find(v.violated.begin(), v.violated.end(), 3), v.violated.end());
  x = base;
  x.alpha = 0.1;
  x.sigma = -0.11;
  v = check_parameter_conditions(h, x);
  EXPECT_NE(std::find(v.violated.begin(), v.violated.end(), 6), v.violated.end());
  EXPECT_FALSE(check_parameter_conditions(0.6, base).base_ok);
}

TEST(Conditions, GridSearchBracketsSevenSixteenths) {
  EXPECT_FALSE(grid_search_feasible(0.40).found);
  EXPECT_FALSE(grid_search_feasible(0.43).found);
  FeasibleSearch s = grid_search_feasible(0.47);
  ASSERT_TRUE(s.found);
  EXPECT_TRUE(check_parameter_conditions(0.47, s.point).ok());
  EXPECT_GT(s.point.sigma, -0.25);
}

TEST(LinearStep, ExponentialEulerIsExactForConstantForcing) {
  const int n = 8;
  FourierField u0 = test::random_field(n, 3), f = test::random_field(n, 4);
  const double dt = 0.01;
  FourierField u = u0;
  for (int i = 0; i < 50; ++i) u = linear_step(u, f, dt, Scheme::exponential_euler);
  const double t = 50 * dt;
  double err = 0.0;
  u.for_each_upper([&](Wave k, cplx c) {
    double lam = k.norm2();
    cplx exact = std::exp(-lam * t) * u0.at_upper(k) + (1.0 - std::exp(-lam * t)) / lam * f.at_upper(k);
    err = std::max(err, std::abs(c - exact));
  });
  EXPECT_LT(err, 1e-13);
}

TEST(LinearStep, ImexIsFirstOrder) {
  const int n = 2;
  FourierField u0 = test::random_field(n, 3), f = test::random_field(n, 4);
  auto run = [&](double dt) {
    FourierField u = u0;
    for (int i = 0; i < std::lround(0.5 / dt); ++i) u = linear_step(u, f, dt, Scheme::imex);
    FourierField e = u0;
    for (int i = 0; i < 1; ++i) e = linear_step(e, f, 0.5, Scheme::exponential_euler);
    return sobolev_norm(u - e, 0.0);
  };
  double r = run(0.01) / run(0.005);
  EXPECT_NEAR(r, 2.0, 0.1);
}

namespace {

SolverConfig small_cfg(double h, int n, double dt, double t) {
  SolverConfig c;
  c.hurst = h;
  c.cutoff = n;
  c.dt = dt;
  c.t_final = t;
  return c;
}

}  // namespace

TEST(Transport, VanishesAlongTrajectory) {
  SolverConfig cfg = small_cfg(0.75, 12, 2e-3, 0.1);
  cfg.sigma = 0.3;
  auto fam = stokes_family(0.75, 12, cfg.dt, cfg.t_final, 11);
  Trajectory z = sample_z_field(fam, uniform_times(cfg.dt, steps_for(cfg.t_final, cfg.dt)));
  SolveResult r = global_solve(cfg, random_smooth_field(12, 5), z);
  ASSERT_FALSE(r.blew_up);
  for (const auto& d : r.diagnostics) EXPECT_LT(std::abs(d.transport), 1e-12 * (1.0 + d.l2 * d.l2 * d.grad));
}

TEST(Energy, DecaysWithoutForcing) {
  SolverConfig cfg = small_cfg(0.75, 12, 1e-3, 0.5);
  Trajectory z = zero_forcing(12, cfg.dt, steps_for(cfg.t_final, cfg.dt));
  SolveResult r = global_solve(cfg, random_smooth_field(12, 9, 2.0, 1.0), z);
  for (std::size_t i = 1; i < r.diagnostics.size(); ++i) EXPECT_LE(r.diagnostics[i].l2, r.diagnostics[i - 1].l2);
  EXPECT_LT(r.diagnostics.back().l2, 0.7 * r.diagnostics.front().l2);
}

TEST(Energy, ResidualShrinksWithDt) {
  auto mean_res = [](double dt) {
    SolverConfig cfg = small_cfg(0.75, 8, dt, 0.05);
    Trajectory z = zero_forcing(8, dt, steps_for(cfg.t_final, dt));
    SolveResult r = global_solve(cfg, random_smooth_field(8, 2, 3.0, 1.0), z);
    double s = 0.0;
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) s += std::abs(r.diagnostics[i].energy_residual);
    return s / (r.diagnostics.size() - 1);
  };
  double a = mean_res(1e-3), b = mean_res(5e-4);
  EXPECT_NEAR(std::log2(a / b), 1.0, 0.2);
}

TEST(GlobalSolve, RejectsLocalRegime) {
  SolverConfig cfg = small_cfg(0.47, 8, 1e-3, 0.01);
  Trajectory z = zero_forcing(8, cfg.dt, 10);
  EXPECT_THROW(global_solve(cfg, FourierField(8), z), PreconditionError);
  cfg = small_cfg(0.75, 8, 1e-3, 0.01);
  cfg.sigma = 0.6;
  EXPECT_THROW(global_solve(cfg, FourierField(8), z), PreconditionError);
}

TEST(GlobalSolve, HaltsOnBlowupThreshold) {
  SolverConfig cfg = small_cfg(0.75, 8, 1e-3, 0.1);
  cfg.blowup_threshold = 0.5;
  Trajectory z = zero_forcing(8, cfg.dt, 100);
  SolveResult r = global_solve(cfg, random_smooth_field(8, 1, 5.0, 0.5), z);
  EXPECT_TRUE(r.blew_up);
  EXPECT_TRUE(r.stopped());
  EXPECT_GT(r.diagnostics.back().sigma_norm, 0.5);
}

TEST(GlobalSolve, RejectsMismatchedForcingGrid) {
  SolverConfig cfg = small_cfg(0.75, 8, 1e-3, 0.1);
  Trajectory z = zero_forcing(8, 3e-4, 400);
  EXPECT_THROW(global_solve(cfg, FourierField(8), z), PreconditionError);
}

TEST(Reconstruct, SumsAndTriangle) {
  SolverConfig cfg = small_cfg(0.75, 8, 2e-3, 0.04);
  cfg.snap_every = 5;
  auto fam = stokes_family(0.75, 8, cfg.dt, cfg.t_final, 2);
  Trajectory z = sample_z_field(fam, uniform_times(cfg.dt, 20));
  SolveResult r = global_solve(cfg, random_smooth_field(8, 3), z);
  Trajectory v = reconstruct_v(r.u, z);
  ASSERT_EQ(v.size(), 5u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const FourierField& zi = z.fields[5 * i];
    EXPECT_LT(test::max_abs_diff(v.fields[i] - zi, r.u.fields[i]), 1e-15);
    EXPECT_LE(sobolev_norm(v.fields[i], 0.4), sobolev_norm(r.u.fields[i], 0.4) + sobolev_norm(zi, 0.4) + 1e-14);
  }
  Trajectory zero = zero_forcing(8, cfg.dt, 20);
  Trajectory vz = reconstruct_v(r.u, zero);
  for (std::size_t i = 0; i < vz.size(); ++i) EXPECT_EQ(vz.fields[i], r.u.fields[i]);
}

TEST(Picard, ZeroDataIsFixedInOneIteration) {
  SolverConfig cfg = small_cfg(0.47, 8, 1e-3, 0.02);
  cfg.set_local(sample_point(0.47));
  PicardResult r = picard_solve(cfg, FourierField(8), zero_forcing(8, cfg.dt, 20));
  EXPECT_EQ(r.status, PicardStatus::converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.residuals.front(), 0.0);
}

TEST(Picard, MatchesExponentialEuler) {
  SolverConfig cfg = small_cfg(0.47, 8, 1e-3, 0.05);
  cfg.set_local(sample_point(0.47));
  cfg.picard_tol = 1e-11;
  FourierField u0 = random_smooth_field(8, 4, 0.5, 2.0);
  Trajectory z = zero_forcing(8, cfg.dt, 50);
  PicardResult p = picard_solve(cfg, u0, z);
  ASSERT_EQ(p.status, PicardStatus::converged) << p.report;
  SolveResult e = march(cfg, u0, z);
  ASSERT_EQ(e.u.size(), 2u);
  FourierField d = p.u.fields.back() - e.u.fields.back();
  EXPECT_LT(besov_norm(d, cfg.sigma, cfg.p, cfg.q), 10 * cfg.picard_tol);
  EXPECT_LT(besov_norm(d, cfg.alpha, cfg.p, cfg.q), 10 * cfg.picard_tol);
}

TEST(Picard, ContractsOnSampledForcing) {
  const double h = 0.47;
  SolverConfig cfg = small_cfg(h, 8, 1e-3, 0.05);
  cfg.set_local(sample_point(h));
  auto fam = stokes_family(h, 8, cfg.dt, cfg.t_final, 21);
  Trajectory z = sample_z_field(fam, uniform_times(cfg.dt, 50));
  PicardResult r = picard_solve(cfg, random_smooth_field(8, 6, 0.1, 2.0), z);
  EXPECT_GT(r.tau, 0.0) << r.report;
  EXPECT_LT(r.worst_factor, 1.0);
  for (double f : r.factors) EXPECT_LT(f, 1.0);
}

TEST(Picard, LargeDataLosesContraction) {
  SolverConfig cfg = small_cfg(0.47, 8, 1e-3, 0.05);
  cfg.set_local(sample_point(0.47));
  cfg.picard_max_iter = 8;
  PicardResult r = picard_solve(cfg, random_smooth_field(8, 6, 400.0, 0.0), zero_forcing(8, cfg.dt, 50));
  EXPECT_NE(r.status, PicardStatus::converged) << r.report;
  EXPECT_LT(r.tau, cfg.t_final);
}

TEST(Picard, RejectsInfeasibleParameters) {
  SolverConfig cfg = small_cfg(0.47, 8, 1e-3, 0.01);
  cfg.set_local(sample_point(0.47));
  cfg.sigma = 0.1;
  EXPECT_THROW(picard_solve(cfg, FourierField(8), zero_forcing(8, cfg.dt, 10)), PreconditionError);
  EXPECT_NO_THROW(picard_solve(cfg, FourierField(8), zero_forcing(8, cfg.dt, 10), true));
}

TEST(Uniqueness, ReplayDeltaSweepAndControl) {
  SolverConfig cfg = small_cfg(0.75, 8, 4e-3, 0.4);
  auto fam = stokes_family(0.75, 8, cfg.dt, cfg.t_final, 31);
  auto alt = stokes_family(0.75, 8, cfg.dt, cfg.t_final, 32);
  auto times = uniform_times(cfg.dt, steps_for(cfg.t_final, cfg.dt));
  UniquenessReport u = uniqueness_check(cfg, random_smooth_field(8, 7), sample_z_field(fam, times),
                                        sample_z_field(alt, times), {1e-3, 1e-5, 1e-7}, 99);
  EXPECT_LT(u.replay_sup, 1e-12);
  EXPECT_LT(u.response_spread(), 2.0);
  EXPECT_GT(u.control_sup, 1e-2);
}
