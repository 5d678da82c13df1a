#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fft.hpp"
#include "fou.hpp"
#include "gibbs.hpp"
#include "wick.hpp"
#include "stats.hpp"

namespace fns2d {

struct SeriesValue {
  double value = 0.0;
  double tail_bound = std::numeric_limits<double>::infinity();
};

struct GrowthVerdict {
  bool converged = false;
  double increment_exponent = 0.0;  // fitted slope of log(increment) vs log(cutoff)
  std::vector<double> relative_changes;
};

// Partial sums S(N_i) at increasing cutoffs. Increments of a convergent lattice
// series decay like N^{-a}, a > 0; a divergent one has nondecreasing increments.
inline GrowthVerdict classify_partial_sums(const std::vector<double>& cutoffs, const std::vector<double>& sums) {
  require(cutoffs.size() == sums.size() && cutoffs.size() >= 3, "classify: need at least three cutoffs");
  GrowthVerdict v;
  std::vector<double> x, d;
  for (std::size_t i = 1; i < sums.size(); ++i) {
    require(cutoffs[i] > cutoffs[i - 1], "classify: cutoffs must increase");
    v.relative_changes.push_back((sums[i] - sums[i - 1]) / std::abs(sums[i - 1]));
    double inc = sums[i] - sums[i - 1];
    require(inc > 0.0, "classify: partial sums must increase strictly");
    x.push_back(cutoffs[i - 1]);
    d.push_back(inc);
  }
  v.increment_exponent = loglog_slope(x, d);
  v.converged = v.increment_exponent < 0.0;
  return v;
}

// E||z(t)||^2_{H^r} truncated to the square: sum over k != 0 of 2 C_H |k|^{2r-4H}.
inline double z_series(double h, double r, int cutoff) {
  const double ch = ch_cached(h);
  double acc = 0.0;
  for (int a = -cutoff; a <= cutoff; ++a)
    for (int b = -cutoff; b <= cutoff; ++b) {
      if (a == 0 && b == 0) continue;
      acc += std::pow(static_cast<double>(a * a + b * b), r - 2 * h);
    }
  return 2.0 * ch * acc;
}

struct ZRegularityRow {
  double hurst, r;
  int cutoff;
  double series_value;
  Estimate mc;  // NaN value when no replicas were requested
  bool converged;
};

// Threshold r* = 2(H - 1/2) separates a finite from an infinite second moment.
inline double z_regularity_threshold(double h) { return 2.0 * (h - 0.5); }

// Series and Monte Carlo values of E||z(0)||^2_{H^r} for each (r, N). The MC
// reuses one draw at the largest cutoff per replica, truncated: the family is
// prefix-stable, so this is the same as sampling each cutoff separately.
inline std::vector<ZRegularityRow> z_regularity_report(double h, const std::vector<double>& r_grid,
                                                       const std::vector<int>& cutoffs, std::size_t replicas,
                                                       std::uint64_t seed) {
  check_hurst(h);
  require(cutoffs.size() >= 3, "z_regularity_report: need at least three cutoffs");
  for (std::size_t i = 1; i < cutoffs.size(); ++i) require(cutoffs[i] > cutoffs[i - 1], "cutoffs must increase");
  const int nmax = cutoffs.back();
  std::vector<std::vector<std::vector<double>>> mc(r_grid.size(), std::vector<std::vector<double>>(cutoffs.size()));
  for (std::size_t rep = 0; rep < replicas; ++rep) {
    FbmFamily fam = stokes_family(h, nmax, 0.25, 0.0, stream_key(seed, static_cast<std::int64_t>(rep)));
    FourierField z = sample_z_field(fam, {0.0}).fields[0];
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      FourierField zc = z.with_cutoff(cutoffs[c]);
      for (std::size_t i = 0; i < r_grid.size(); ++i) mc[i][c].push_back(std::pow(sobolev_norm(zc, r_grid[i]), 2));
    }
  }
  std::vector<ZRegularityRow> rows;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    std::vector<double> ns, ss;
    for (int n : cutoffs) {
      ns.push_back(n);
      ss.push_back(z_series(h, r_grid[i], n));
    }
    bool conv = classify_partial_sums(ns, ss).converged;
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      Estimate e{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      if (replicas >= 2) e = mean_se(mc[i][c]);
      rows.push_back({h, r_grid[i], cutoffs[c], ss[c], e, conv});
    }
  }
  return rows;
}

namespace detail {

// Lattice tail sum_{|h| > R} g(|h|) for g(t) <= (t - |k|)^{-e}, bounded by the
// integral over |x| > R - a with a = sqrt(2)/2 the half-diagonal of a unit cell.
inline double radial_tail(double R, double kn, double e) {
  const double a = std::numbers::sqrt2 / 2;
  double u0 = R - 2 * a - kn;
  if (u0 <= 0.0 || e <= 2.0) return std::numeric_limits<double>::infinity();
  return 2 * std::numbers::pi * (std::pow(u0, 2 - e) / (e - 2) + (kn + a) * std::pow(u0, 1 - e) / (e - 1));
}

template <class F>
double disk_sum(Wave k, int R, F&& f) {
  double acc = 0.0;
  const long long r2 = static_cast<long long>(R) * R;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b) {
      Wave h{a, b};
      if (h.is_zero() || h == k || h.norm2() > r2) continue;
      acc += f(h);
    }
  return acc;
}

}  // namespace detail

// sum_{h != 0, k} |h|^{-4H} |k-h|^{-4H} over the disk |h| <= R, with a rigorous tail bound.
inline SeriesValue s1_sum(Wave k, double h, int R) {
  if (!(h > 0.25 && h < 1.0)) throw PreconditionError("S1: needs 1/4 < H < 1, got H=" + std::to_string(h));
  require(!k.is_zero() && R >= 1, "S1: need k != 0 and R >= 1");
  double v = detail::disk_sum(k, R, [&](Wave q) {
    return std::pow(static_cast<double>(q.norm2()) * static_cast<double>((k - q).norm2()), -2 * h);
  });
  return {v, detail::radial_tail(R, k.norm(), 8 * h)};
}

// sum_{h != 0, k} |h|^{2 rho + 2 - 4H} |k-h|^{-4H}.
inline SeriesValue s2_sum(Wave k, double h, double rho, int R) {
  if (!(h > 0.5 && h < 1.0)) throw PreconditionError("S2: needs 1/2 < H < 1, got H=" + std::to_string(h));
  if (!(rho > -1.0 && rho < 2 * (h - 1)))
    throw PreconditionError("S2: needs -1 < rho < 2(H-1), got rho=" + std::to_string(rho));
  require(!k.is_zero() && R >= 1, "S2: need k != 0 and R >= 1");
  double v = detail::disk_sum(k, R, [&](Wave q) {
    return std::pow(static_cast<double>(q.norm2()), rho + 1 - 2 * h) *
           std::pow(static_cast<double>((k - q).norm2()), -2 * h);
  });
  return {v, detail::radial_tail(R, k.norm(), 8 * h - 2 * rho - 2)};
}

inline bool s3_admissible(double h, double rho) {
  if (!(h > 0.25 && h < 1.0)) return false;
  return h < 0.5 ? rho < 4 * h - 3 : rho < 2 * (h - 1);
}

inline void check_s3(double h, double rho) {
  if (!s3_admissible(h, rho))
    throw PreconditionError("S3: (H, rho) = (" + std::to_string(h) + ", " + std::to_string(rho) +
                            ") outside the admissible window rho < 4H-3 (H<1/2) or rho < 2(H-1) (H>=1/2)");
}

inline constexpr int kS3MaxR = 24;

// Single term of the triple sum; symmetric in (h, l).
inline double s3_term(Wave j, Wave h, Wave l, double H, double rho) {
  if (h.is_zero() || l.is_zero() || h == j || l == j || h == l) return 0.0;
  double e = rho + 1.0;
  return std::pow(static_cast<double>(j.norm2()), e) * std::pow(static_cast<double>((h - l).norm2()), e) *
         std::pow(static_cast<double>(h.norm2()) * static_cast<double>(l.norm2()) *
                      static_cast<double>((h - j).norm2()) * static_cast<double>((l - j).norm2()),
                  -2 * H);
}

// Brute force over the square |.|_inf <= R, O(R^6); reference for small R only.
inline double s3_brute(double H, double rho, int R) {
  check_s3(H, rho);
  double acc = 0.0;
  for (Wave j : wick::square_modes(R))
    for (Wave h : wick::square_modes(R))
      for (Wave l : wick::square_modes(R)) acc += s3_term(j, h, l, H, rho);
  return acc;
}

// sum_j |j|^{2rho+2} sum_{h,l} a_j(h) a_j(l) |h-l|^{2rho+2}, a_j(h) = |h|^{-4H}|h-j|^{-4H},
// on the square |.|_inf <= R. The inner double sum is a quadratic form with a
// translation-invariant kernel, evaluated by FFT correlation per j.
inline double s3_sum(double H, double rho, int R) {
  check_s3(H, rho);
  if (R < 1 || R > kS3MaxR)
    throw PreconditionError("S3: R=" + std::to_string(R) + " outside [1, " + std::to_string(kS3MaxR) + "]");
  const int P = smooth_size(4 * R + 1);
  const std::size_t P2 = static_cast<std::size_t>(P) * P;
  CBuffer kern(P2);
  for (int a = -2 * R; a <= 2 * R; ++a)
    for (int b = -2 * R; b <= 2 * R; ++b) {
      if (a == 0 && b == 0) continue;
      kern[static_cast<std::size_t>(wrap(a, P)) * P + wrap(b, P)] =
          std::pow(static_cast<double>(a * a + b * b), rho + 1.0);
    }
  fft2_forward(kern, P);
  const std::vector<Wave> modes = wick::square_modes(R);
  double total = 0.0;
  CBuffer buf(P2);
  for (Wave j : modes) {
    std::fill(buf.begin(), buf.end(), cplx{});
    for (Wave h : modes) {
      if (h == j) continue;
      buf[static_cast<std::size_t>(wrap(h.k1, P)) * P + wrap(h.k2, P)] =
          std::pow(static_cast<double>(h.norm2()) * static_cast<double>((h - j).norm2()), -2 * H);
    }
    fft2_forward(buf, P);
    double q = 0.0;
    for (std::size_t i = 0; i < P2; ++i) q += std::norm(buf[i]) * kern[i].real();
    total += std::pow(static_cast<double>(j.norm2()), rho + 1.0) * q / static_cast<double>(P2);
  }
  return total;
}

struct SlopeFit {
  double slope = 0.0;
  double expected = 0.0;
  std::vector<double> ks, values;
};

inline const std::vector<int>& slope_radii() {
  static const std::vector<int> ks = {8, 11, 16, 23, 32, 45, 64};
  return ks;
}

// Fit of log S(k) against log|k| along k = (m, 0), m in [8, 64].
template <class Sum>
SlopeFit fit_slope(Sum&& sum, double expected) {
  SlopeFit f;
  f.expected = expected;
  for (int m : slope_radii()) {
    f.ks.push_back(m);
    f.values.push_back(sum(Wave{m, 0}));
  }
  f.slope = loglog_slope(f.ks, f.values);
  return f;
}

// The exponent S_1(k) ~ |k|^{-e} in each Hurst regime.
inline double s1_exponent(double h) { return h < 0.5 ? 8 * h - 2 : 4 * h; }

// E||B(z,z)||^2_{H^rho} at a sequence of cutoffs and the convergence verdict.
struct BzzSeriesScan {
  std::vector<double> cutoffs, values;
  GrowthVerdict verdict;
};

inline BzzSeriesScan bzz_series_scan(double h, double rho, const std::vector<int>& cutoffs) {
  require_bzz_hurst(h);
  BzzSeriesScan s;
  for (int n : cutoffs) {
    s.cutoffs.push_back(n);
    s.values.push_back(bzz_second_moment_series(GibbsSpec::make(h, n).spectrum(), rho));
  }
  s.verdict = classify_partial_sums(s.cutoffs, s.values);
  return s;
}

// Decay of the B(z,z) series read off the summand instead of the partial sums.
// E|B_k|^2 is evaluated with the inner cutoff a fixed multiple of |k|, so the
// inner truncation error is the same fraction at every radius and drops out of
// the local exponents. Those are Aitken-extrapolated; a dyadic shell then
// contributes ~ R^{2 rho + e + 2}.
struct BzzTailExponent {
  std::vector<int> radii;
  std::vector<double> local_exponents;  // between consecutive radii
  double summand_exponent = 0.0;        // extrapolated exponent of E|B_k|^2
  double shell_exponent = 0.0;
  bool converged = false;
};

inline constexpr int kTailInnerFactor = 16;

inline double bzz_shell_probe(double h, int m) {
  auto s = GibbsSpec::make(h, kTailInnerFactor * m).spectrum();
  return bzz_mode_second_moment(s, Wave{m, 0}) + bzz_mode_second_moment(s, Wave{m, m / 2}) +
         bzz_mode_second_moment(s, Wave{m, m});
}

inline BzzTailExponent bzz_tail_exponent(double h, double rho, const std::vector<int>& radii = {8, 16, 32, 64}) {
  require_bzz_hurst(h);
  require(radii.size() >= 4, "tail exponent: need at least four radii");
  BzzTailExponent t;
  t.radii = radii;
  double prev = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(i == 0 || radii[i] > radii[i - 1], "tail exponent: radii must increase");
    double v = bzz_shell_probe(h, radii[i]);
    if (i > 0)
      t.local_exponents.push_back(std::log(v / prev) / std::log(double(radii[i]) / radii[i - 1]));
    prev = v;
  }
  const auto& e = t.local_exponents;
  double e1 = e[e.size() - 3], e2 = e[e.size() - 2], e3 = e.back();
  double d1 = e2 - e1, d2 = e3 - e2, dd = d2 - d1;
  // Aitken only when the exponents approach monotonically at a shrinking rate.
  if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1) && dd != 0.0)
    t.summand_exponent = e3 - d2 * d2 / dd;
  else
    t.summand_exponent = e3;
  t.shell_exponent = 2.0 * rho + t.summand_exponent + 2.0;
  t.converged = t.shell_exponent < 0.0;
  return t;
}

}  // namespace fns2d
