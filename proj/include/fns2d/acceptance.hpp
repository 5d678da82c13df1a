#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bilinear.hpp"
#include "dpd.hpp"
#include "fou.hpp"
#include "gibbs.hpp"
#include "parallel.hpp"
#include "series.hpp"
#include "stats.hpp"
#include "wick.hpp"

namespace fns2d::accept {

enum class Tier { full, quick };

struct Result {
  Result() = default;
  Result(int i, std::string t) : id(i), title(std::move(t)) {}

  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;
  double seconds = 0.0;
};

inline std::string strf(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

inline const char* mark(bool ok) { return ok ? "ok" : "FAIL"; }

// Stationary fOU variance C_H lambda^{-2H} and the C_H quadrature.
inline Result c1_fou_variance(Tier tier, int threads) {
  constexpr double kSigmas = 4.0, kQuadErr = 1e-6, kHalfTol = 1e-6;
  const std::size_t replicas = tier == Tier::full ? 20000 : 4000;
  Result r{1, "fOU stationary variance law"};
  bool ok = true;
  for (double h : {0.45, 0.6, 0.75}) {
    ChConstant c = compute_ch(h);
    double closed = std::tgamma(2 * h + 1) / 2;
    bool q = c.error <= kQuadErr;
    ok = ok && q;
    r.details.push_back(strf("C_H H=%.2f quad=%.12f err=%.2e closed=%.12f %s", h, c.value, c.error, closed, mark(q)));
  }
  ChConstant half = compute_ch(0.5);
  bool hq = std::abs(half.value - 0.5) <= kHalfTol && half.error <= kQuadErr;
  ok = ok && hq;
  r.details.push_back(strf("C_1/2=%.12f |C-0.5|=%.2e %s", half.value, std::abs(half.value - 0.5), mark(hq)));
  std::vector<std::pair<double, double>> grid;
  for (double lam : {1.0, 4.0, 9.0})
    for (double h : {0.45, 0.6, 0.75}) grid.emplace_back(lam, h);
  std::vector<FouVarianceCheck> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    out[i] = fou_variance_check(grid[i].first, grid[i].second, replicas, 1000 + i, kSigmas);
  });
  for (const auto& c : out) {
    ok = ok && c.pass;
    r.details.push_back(strf("lambda=%g H=%.2f var=%.6f se=%.6f theory=%.6f z=%+.2f %s", c.lambda, c.hurst,
                             c.empirical.value, c.empirical.se, c.theory,
                             (c.empirical.value - c.theory) / c.empirical.se, mark(c.pass)));
  }
  r.pass = ok;
  return r;
}

// Cutoff doubling 8 -> 16 -> 32 on either side of r* = 2(H - 1/2).
inline Result c2_z_regularity(Tier, int) {
  constexpr double kMargin = 0.1, kMaxRelChange = 0.03, kMinGrowth = 2.0;
  const std::vector<int> cutoffs = {8, 16, 32};
  Result r{2, "z regularity threshold under cutoff doubling"};
  bool ok = true;
  for (double h : {0.45, 0.6, 0.75}) {
    const double rs = z_regularity_threshold(h);
    std::vector<double> lo, hi;
    for (int n : cutoffs) {
      lo.push_back(z_series(h, rs - kMargin, n));
      hi.push_back(z_series(h, rs + kMargin, n));
    }
    double change = (lo[2] - lo[1]) / lo[1];
    double g1 = hi[1] / hi[0], g2 = hi[2] / hi[1];
    bool below = change < kMaxRelChange, above = g1 > kMinGrowth && g2 > kMinGrowth;
    ok = ok && below && above;
    r.details.push_back(strf("H=%.2f r=%.2f: S=%.5g,%.5g,%.5g rel change 16->32 %.4f (< %.2f) %s", h, rs - kMargin,
                             lo[0], lo[1], lo[2], change, kMaxRelChange, mark(below)));
    r.details.push_back(strf("H=%.2f r=%.2f: S=%.5g,%.5g,%.5g growth %.3fx, %.3fx (> %.1fx) %s", h, rs + kMargin, hi[0],
                             hi[1], hi[2], g1, g2, kMinGrowth, mark(above)));
  }
  r.pass = ok;
  return r;
}

inline double max_rel_coeff_error(const FourierField& a, const FourierField& b) {
  double num = 0.0, den = 0.0;
  b.for_each_upper([&](Wave k, cplx c) {
    num = std::max(num, std::abs(a.at_upper(k) - c));
    den = std::max(den, std::abs(c));
  });
  return num / std::max(den, 1e-300);
}

inline Result c3_bilinear_oracle(Tier, int) {
  constexpr double kTol = 1e-10;
  Result r{3, "bilinear FFT route equals direct convolution"};
  bool ok = true;
  for (int n : {4, 8, 16}) {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      FourierField u = random_smooth_field(n, 3000 + 100 * n + s, 1.0, 1.0);
      FourierField v = random_smooth_field(n, 3050 + 100 * n + s, 1.0, 0.5);
      worst = std::max(worst, max_rel_coeff_error(bilinear_fft(u, v), bilinear_direct(u, v)));
    }
    ok = ok && worst < kTol;
    r.details.push_back(strf("N=%d 20 pairs: max rel coefficient error %.2e (< %.0e) %s", n, worst, kTol, mark(worst < kTol)));
  }
  std::size_t bad = 0, checked = 0;
  for (int n : {4, 8, 16}) {
    FourierField u = random_smooth_field(n, 3900 + n), v = random_smooth_field(n, 3950 + n);
    for (int k1 = -2 * n; k1 <= 2 * n; ++k1)
      for (int k2 = -2 * n; k2 <= 2 * n; ++k2) {
        Wave k{k1, k2};
        if (k.is_zero()) continue;
        ++checked;
        if (std::conj(bilinear_direct_at(u, v, k)) != -bilinear_direct_at(u, v, -k)) ++bad;
      }
  }
  ok = ok && bad == 0;
  r.details.push_back(strf("conj(B_k) == -B_{-k} bitwise on %zu modes, %zu mismatches %s", checked, bad, mark(bad == 0)));
  r.pass = ok;
  return r;
}

inline Result c4_trilinear(Tier, int) {
  constexpr double kTol = 1e-10;
  Result r{4, "trilinear cancellation and antisymmetry"};
  double w1 = 0.0, w2 = 0.0;
  const int ns[] = {4, 8, 12, 16};
  for (std::uint64_t s = 0; s < 100; ++s) {
    int n = ns[s % 4];
    FourierField a = random_smooth_field(n, 4000 + s, 1.0, 1.0), b = random_smooth_field(n, 4200 + s, 1.0, 1.0),
                 c = random_smooth_field(n, 4400 + s, 1.0, 1.0);
    double scale = sobolev_norm(a, 0.0) * sobolev_norm(b, 1.0) * sobolev_norm(c, 1.0);
    w1 = std::max(w1, std::abs(trilinear(a, b, b)) / (sobolev_norm(a, 0.0) * sobolev_norm(b, 1.0) * sobolev_norm(b, 0.0)));
    w2 = std::max(w2, std::abs(trilinear(a, b, c) + trilinear(a, c, b)) / scale);
  }
  r.pass = w1 < kTol && w2 < kTol;
  r.details.push_back(strf("100 triples: max |<B(u1,u2),u2>|/scale %.2e (< %.0e) %s", w1, kTol, mark(w1 < kTol)));
  r.details.push_back(strf("100 triples: max |<B(u1,u2),u3>+<B(u1,u3),u2>|/scale %.2e (< %.0e) %s", w2, kTol, mark(w2 < kTol)));
  return r;
}

inline Result c5_bzz_second(Tier tier, int) {
  constexpr double kSigmas = 4.0;
  const std::size_t samples = tier == Tier::full ? 5000 : 1000;
  Result r{5, "B(z,z) second moment: Wick series vs Monte Carlo, threshold bracketing"};
  bool ok = true;
  for (auto [h, rho] : {std::pair{0.75, -0.75}, std::pair{0.45, -1.3}}) {
    MomentReport m = bzz_second_moment(GibbsSpec::make(h, 8), rho, samples, 5000 + static_cast<std::uint64_t>(h * 100));
    bool a = m.agrees(kSigmas);
    ok = ok && a;
    r.details.push_back(strf("H=%.2f rho=%.2f N=8: series %.6f MC %.6f +- %.6f (z=%+.2f, %zu samples) %s", h, rho,
                             m.series_value, m.mc.value, m.mc.se, (m.mc.value - m.series_value) / m.mc.se, samples,
                             mark(a)));
  }
  BzzTailExponent conv = bzz_tail_exponent(0.45, -1.3), div = bzz_tail_exponent(0.45, -1.0);
  bool br = conv.converged && !div.converged;
  ok = ok && br;
  r.details.push_back(strf("tail: E|B_k|^2 ~ |k|^%.3f (H=0.45); shell exponent rho=-1.3 %+.3f (converges), rho=-1.0 %+.3f (diverges) %s",
                           conv.summand_exponent, conv.shell_exponent, div.shell_exponent, mark(br)));
  for (double rho : {-1.3, -1.0}) {
    BzzSeriesScan s = bzz_series_scan(0.45, rho, {8, 16, 32});
    r.details.push_back(strf("info: partial sums H=0.45 rho=%.1f N=8,16,32: %.5g %.5g %.5g increment slope %+.3f", rho,
                             s.values[0], s.values[1], s.values[2], s.verdict.increment_exponent));
  }
  r.pass = ok;
  return r;
}

inline Result c6_bzz_fourth(Tier tier, int) {
  // Round-off: each pairing sums ~ (80)^3 = 5e5 products at N = 4 in a
  // different order on each route, so n eps ~ 6e-11.
  constexpr double kSigmas = 4.0, kTermTol = 1e-10, kBlockTol = 1e-10;
  const std::size_t samples = tier == Tier::full ? 1000000 : 100000;
  Result r{6, "B(z,z) fourth moment: generic Wick engine, case list, Monte Carlo"};
  std::vector<std::pair<double, double>> pts = {{0.75, -0.75}};
  if (tier == Tier::full) pts.emplace_back(0.45, -1.3);
  bool ok = true;
  for (auto [h, rho] : pts) {
    Spectrum s = GibbsSpec::make(h, 4).spectrum();
    FourthMomentReport m = bzz_fourth_moment(s, rho, samples, 6000 + static_cast<std::uint64_t>(h * 100));
    double scale = std::abs(m.generic.total), worst = 0.0;
    std::size_t missing = 0;
    for (const auto& [key, g] : m.generic.terms) {
      auto it = m.cases.terms.find(key);
      if (it == m.cases.terms.end()) {
        ++missing;
        continue;
      }
      worst = std::max(worst, std::abs(g - it->second) / scale);
    }
    missing += m.cases.terms.size() > m.generic.terms.size() ? m.cases.terms.size() - m.generic.terms.size() : 0;
    bool terms = missing == 0 && worst < kTermTol && m.generic.terms.size() == 60;
    double m2sq = m.second_moment_series * m.second_moment_series;
    double block = std::abs(m.cases.block_diagonal - m2sq) / m2sq;
    double gblock = std::abs(m.generic.block_diagonal - m2sq) / m2sq;
    bool blk = block < kBlockTol && gblock < kBlockTol;
    double zg = (m.mc.value - m.generic.total) / m.mc.se, zc = (m.mc.value - m.cases.total) / m.mc.se;
    bool mc = std::abs(zg) < kSigmas && std::abs(zc) < kSigmas;
    ok = ok && terms && blk && mc;
    r.details.push_back(strf("H=%.2f rho=%.2f N=4: %zu pairings, max term diff/total %.2e (< %.0e) %s", h, rho,
                             m.generic.terms.size(), worst, kTermTol, mark(terms)));
    r.details.push_back(strf("  totals generic %.8g cases %.8g; MC %.8g +- %.3g (%zu samples, z=%+.2f/%+.2f) %s",
                             m.generic.total, m.cases.total, m.mc.value, m.mc.se, samples, zg, zc, mark(mc)));
    r.details.push_back(strf("  block-internal pairings %.10g vs (E||B||^2)^2 %.10g rel %.1e (cases) %.1e (generic) (< %.0e) %s",
                             m.cases.block_diagonal, m2sq, block, gblock, kBlockTol, mark(blk)));
    r.details.push_back(strf("  info: case-1 (h=h', l=l') alone %.8g", m.cases.cases[0]));
  }
  r.pass = ok;
  return r;
}

inline Result c7_lattice_sums(Tier tier, int) {
  constexpr double kSlopeTol = 0.15, kS3Change = 0.05;
  const int R = tier == Tier::full ? 1024 : 512;
  Result r{7, "lattice sum scalings and triple-sum stabilization"};
  bool ok = true;
  auto slope_line = [&](const char* name, const SlopeFit& f) {
    bool a = std::abs(f.slope - f.expected) <= kSlopeTol;
    ok = ok && a;
    r.details.push_back(strf("%s: fitted slope %.4f expected %.4f (+-%.2f) %s", name, f.slope, f.expected, kSlopeTol, mark(a)));
  };
  slope_line("S_1 H=0.40", fit_slope([&](Wave k) { return s1_sum(k, 0.4, R).value; }, -s1_exponent(0.4)));
  slope_line("S_1 H=0.75", fit_slope([&](Wave k) { return s1_sum(k, 0.75, R).value; }, -s1_exponent(0.75)));
  slope_line("S_2 H=0.75 rho=-0.75",
             fit_slope([&](Wave k) { return s2_sum(k, 0.75, -0.75, R).value; }, -(4 * 0.75 + 2 * 0.75 - 2)));
  for (auto [h, rho] : {std::pair{0.75, -0.75}, std::pair{0.6, -1.0}, std::pair{0.45, -1.3}}) {
    double a = s3_sum(h, rho, 12), b = s3_sum(h, rho, 24);
    double ch = std::abs(b - a) / a;
    bool s = ch < kS3Change;
    ok = ok && s;
    r.details.push_back(strf("S_3 H=%.2f rho=%.2f: R=12 %.6g R=24 %.6g change %.4f (< %.2f) %s", h, rho, a, b, ch,
                             kS3Change, mark(s)));
  }
  r.pass = ok;
  return r;
}

inline Result c8_parameter_window(Tier, int) {
  Result r{8, "local-regime parameter window"};
  const double c = 1.0 / 32;
  ConditionVerdict v = check_parameter_conditions(7.0 / 16 + c, sample_point(7.0 / 16 + c));
  FeasibleSearch lo = grid_search_feasible(0.40), hi = grid_search_feasible(0.47);
  r.details.push_back(strf("sample point c=1/32: all nine conditions %s", mark(v.ok())));
  r.details.push_back(strf("grid search H=0.40 step 1/256: %zu grid points, feasible=%d %s", lo.visited, lo.found, mark(!lo.found)));
  r.details.push_back(strf("grid search H=0.47: feasible=%d at sigma=%.5f alpha=%.5f 2/beta=%.5f 2/p=%.5f %s", hi.found,
                           hi.point.sigma, hi.point.alpha, 2 / hi.point.beta, 2 / hi.point.p, mark(hi.found)));
  r.pass = v.ok() && !lo.found && hi.found;
  return r;
}

inline Result c9_picard(Tier tier, int threads) {
  constexpr int kSeeds = 10, kNeeded = 9;
  constexpr double kMaxRatio = 0.9;
  const int seeds = tier == Tier::full ? kSeeds : 3, needed = tier == Tier::full ? kNeeded : 3;
  Result r{9, "local Picard contraction"};
  SolverConfig cfg;
  cfg.hurst = 0.47;
  cfg.cutoff = 16;
  cfg.dt = 1e-3;
  cfg.t_final = 0.1;
  cfg.picard_tol = 1e-10;
  cfg.set_local(sample_point(cfg.hurst));
  std::vector<PicardResult> out(static_cast<std::size_t>(seeds));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    auto fam = stokes_family(cfg.hurst, cfg.cutoff, cfg.dt, cfg.t_final, 9000 + i);
    Trajectory z = sample_z_field(fam, uniform_times(cfg.dt, steps_for(cfg.t_final, cfg.dt)));
    out[i] = picard_solve(cfg, random_smooth_field(cfg.cutoff, 9100 + i, 0.1, 2.0), z);
  });
  int good = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& p = out[i];
    double worst = 0.0;
    for (double f : p.factors) worst = std::max(worst, f);
    bool g = p.tau > 0.0 && !p.factors.empty() && worst < kMaxRatio;
    good += g;
    r.details.push_back(strf("seed %zu: %s, max residual ratio %.3f (< %.1f) %s", i, p.report.c_str(), worst, kMaxRatio, mark(g)));
  }
  r.pass = good >= needed;
  r.details.push_back(strf("%d of %d seeds certified (need %d)", good, seeds, needed));
  return r;
}

inline Result c10_global(Tier tier, int threads) {
  constexpr double kDtChange = 0.05, kOrderLo = 0.8, kOrderHi = 1.2;
  const int seeds = tier == Tier::full ? 10 : 2;
  Result r{10, "global regime: no blow-up, dt refinement, energy ledger order"};
  SolverConfig cfg;
  cfg.hurst = 0.75;
  cfg.sigma = 0.4;
  cfg.cutoff = tier == Tier::full ? 32 : 16;
  cfg.t_final = 5.0;
  const double dt = 5e-3;
  struct Row {
    double sup_a, sup_b, fin_a, fin_b;
    bool blew;
  };
  std::vector<Row> rows(static_cast<std::size_t>(seeds));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    auto fam = stokes_family(cfg.hurst, cfg.cutoff, dt / 2, cfg.t_final, 10000 + i);
    Trajectory z = sample_z_field(fam, uniform_times(dt / 2, steps_for(cfg.t_final, dt / 2)));
    FourierField v0 = random_smooth_field(cfg.cutoff, 10100 + i);
    SolverConfig a = cfg, b = cfg;
    a.dt = dt;
    b.dt = dt / 2;
    SolveResult ra = global_solve(a, v0, z), rb = global_solve(b, v0, z);
    rows[i] = {ra.sup_sigma, rb.sup_sigma, ra.diagnostics.back().sigma_norm, rb.diagnostics.back().sigma_norm,
               ra.blew_up || rb.blew_up};
  });
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& w = rows[i];
    double ch = std::abs(w.sup_a - w.sup_b) / w.sup_b;
    bool g = !w.blew && ch < kDtChange;
    ok = ok && g;
    r.details.push_back(strf("seed %zu N=%d T=5: sup ||u||_H^0.4 dt=%.4g %.6f dt/2 %.6f change %.2e (< %.2f); "
                             "info ||u(T)|| change %.2e; blow-up %d %s",
                             i, cfg.cutoff, dt, w.sup_a, w.sup_b, ch, kDtChange, std::abs(w.fin_a - w.fin_b) / w.fin_b,
                             w.blew, mark(g)));
  }
  // Energy ledger: the per-step residual is local, so the order shows once |k|^2 dt is small.
  const double base = 1e-4, t_short = 0.02;
  auto fam = stokes_family(cfg.hurst, cfg.cutoff, base, t_short, 10999);
  Trajectory z = sample_z_field(fam, uniform_times(base, steps_for(t_short, base)));
  FourierField v0 = random_smooth_field(cfg.cutoff, 10998);
  std::vector<double> dts = {4e-4, 2e-4, 1e-4}, res;
  for (double d : dts) {
    SolverConfig c = cfg;
    c.dt = d;
    c.t_final = t_short;
    SolveResult s = global_solve(c, v0, z);
    double acc = 0.0;
    for (std::size_t i = 1; i < s.diagnostics.size(); ++i) acc += std::abs(s.diagnostics[i].energy_residual);
    res.push_back(acc / static_cast<double>(s.diagnostics.size() - 1));
  }
  double order = loglog_slope(dts, res);
  bool ord = order >= kOrderLo && order <= kOrderHi;
  ok = ok && ord;
  r.details.push_back(strf("energy residual mean |r| at dt=4e-4,2e-4,1e-4: %.4e %.4e %.4e, order %.3f in [%.1f, %.1f] %s",
                           res[0], res[1], res[2], order, kOrderLo, kOrderHi, mark(ord)));
  r.pass = ok;
  return r;
}

inline Result c11_uniqueness(Tier tier, int) {
  constexpr double kReplay = 1e-12, kSpread = 2.0, kControl = 1e-3;
  Result r{11, "pathwise uniqueness proxy"};
  SolverConfig cfg;
  cfg.hurst = 0.75;
  cfg.sigma = 0.4;
  cfg.cutoff = 16;
  cfg.dt = 2e-3;
  cfg.t_final = tier == Tier::full ? 1.0 : 0.4;
  auto times = uniform_times(cfg.dt, steps_for(cfg.t_final, cfg.dt));
  Trajectory z = sample_z_field(stokes_family(cfg.hurst, cfg.cutoff, cfg.dt, cfg.t_final, 11000), times);
  Trajectory zc = sample_z_field(stokes_family(cfg.hurst, cfg.cutoff, cfg.dt, cfg.t_final, 11001), times);
  UniquenessReport u = uniqueness_check(cfg, random_smooth_field(cfg.cutoff, 11002), z, zc, {1e-3, 1e-5, 1e-7}, 11003);
  bool rp = u.replay_sup < kReplay, sp = !u.blew_up && u.response_spread() < kSpread, ct = u.control_sup > kControl;
  r.details.push_back(strf("identical replay: sup_t ||V||_H^0 = %.2e (< %.0e) %s", u.replay_sup, kReplay, mark(rp)));
  r.details.push_back(strf("||V(T)||/delta at delta=1e-3,1e-5,1e-7: %.6f %.6f %.6f, spread %.4f (< %.1f) %s",
                           u.final_response[0], u.final_response[1], u.final_response[2], u.response_spread(), kSpread,
                           mark(sp)));
  r.details.push_back(strf("control, V(0)=0 with distinct forcing: sup_t ||V|| = %.4f (> %.0e) %s", u.control_sup, kControl,
                           mark(ct)));
  r.pass = rp && sp && ct;
  return r;
}

using Fn = Result (*)(Tier, int);

inline const std::vector<Fn>& registry() {
  static const std::vector<Fn> r = {c1_fou_variance, c2_z_regularity, c3_bilinear_oracle, c4_trilinear,
                                    c5_bzz_second,   c6_bzz_fourth,   c7_lattice_sums, c8_parameter_window,
                                    c9_picard,       c10_global,      c11_uniqueness};
  return r;
}

inline int criterion_count() { return static_cast<int>(registry().size()); }

inline Result run(int id, Tier tier, int threads) {
  require(id >= 1 && id <= criterion_count(), "accept: criterion id must be in [1, " + std::to_string(criterion_count()) + "]");
  auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = registry()[static_cast<std::size_t>(id - 1)](tier, threads);
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "error";
    r.pass = false;
    r.details.push_back(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::string summary_line(const Result& r) {
  return strf("%s criterion %d: %s (%.1fs)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
}

}  // namespace fns2d::accept
