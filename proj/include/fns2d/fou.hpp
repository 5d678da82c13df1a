#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fbm.hpp"
#include "quadrature.hpp"
#include "stats.hpp"
#include "trajectory.hpp"

namespace fns2d {

struct ChConstant {
  double value = 0.0;
  double error = 0.0;  // quadrature estimate plus truncation bound
};

// C_H = int_0^inf int_0^inf e^{-r-s} C(r, s) dr ds with C the fBm covariance,
// so that the stationary fOU variance at rate lambda is C_H lambda^{-2H}.
inline ChConstant compute_ch(double h, double tol = 1e-9) {
  check_hurst(h);
  require(tol > 0.0, "compute_ch: tol must be positive");
  const double S = 50.0;
  const double inner_tol = tol / (40.0 * S);
  double inner_err = 0.0;
  auto inner = [&](double s) {
    auto f = [&](double r) { return std::exp(-r - s) * fbm_covariance(r, s, h); };
    QuadResult q = integrate(f, 0.0, s, inner_tol, 400);
    inner_err = std::max(inner_err, q.error);
    return q.value;
  };
  // Symmetry in (r, s): integrate over r < s and double.
  QuadResult outer = integrate(inner, 0.0, S, tol / 8.0, 400);
  double a = 2 * h + 1;
  double tail = std::exp(-S) * (2.0 * std::pow(S, a - 1) + 2.0);
  ChConstant c{2.0 * outer.value, 2.0 * (outer.error + S * inner_err) + tail};
  if (!(c.error <= tol))
    throw NumericalError("compute_ch: error estimate " + std::to_string(c.error) + " above tol " + std::to_string(tol));
  return c;
}

inline double ch_cached(double h) {
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(h);
  if (it != cache.end()) return it->second;
  double v = compute_ch(h).value;
  cache.emplace(h, v);
  return v;
}

// (1 - e^{-x}) / x, with the series near 0.
inline double phi1(double x) {
  if (std::abs(x) < 1e-5) return 1.0 - x / 2.0 + x * x / 6.0;
  return -std::expm1(-x) / x;
}

struct FouParams {
  double lambda = 1.0;
  double hurst = 0.5;
  double trunc_tol = 1e-8;

  // Start time offset so that the neglected past carries variance below trunc_tol.
  double burn_in() const { return std::max(1.0, -std::log(trunc_tol) / lambda); }
};

inline constexpr double kMaxRateStep = 0.25;

struct FouSamples {
  std::vector<double> values;
  // Relative weight e^{-2 lambda T} of the past dropped by starting at t0 = -T;
  // nonzero warning text when T is shorter than the burn-in.
  double dropped_past = 0.0;
  std::string warning;
};

namespace detail {

inline std::size_t grid_index(double t, const FbmPath& p) {
  double r = (t - p.t0) / p.dt;
  double n = std::round(r);
  if (std::abs(r - n) > 1e-7 || n < 0 || n > static_cast<double>(p.steps()))
    throw PreconditionError("time " + std::to_string(t) + " is not a point of the driving path grid (t0=" +
                            std::to_string(p.t0) + ", dt=" + std::to_string(p.dt) + ")");
  return static_cast<std::size_t>(n);
}

}  // namespace detail

// z(t) = int_{t0}^t e^{-lambda (t-s)} db(s), with db piecewise-linear between path
// samples: z_{i+1} = e^{-lambda dt} z_i + phi1(lambda dt) (b_{i+1} - b_i).
inline FouSamples sample_fou_path(const FouParams& prm, const FbmPath& path, const std::vector<double>& t_grid) {
  require(prm.lambda > 0.0, "fOU: lambda must be positive");
  check_hurst(prm.hurst);
  const double x = prm.lambda * path.dt;
  if (x > kMaxRateStep)
    throw PreconditionError("fOU: lambda*dt = " + std::to_string(x) + " exceeds " + std::to_string(kMaxRateStep) +
                            "; refine the driving path");
  FouSamples out;
  out.values.resize(t_grid.size());
  std::vector<std::size_t> idx(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) idx[i] = detail::grid_index(t_grid[i], path);
  for (std::size_t i = 1; i < idx.size(); ++i)
    require(idx[i] >= idx[i - 1], "fOU: output times must be nondecreasing");

  const double a = std::exp(-x), w = phi1(x);
  double z = 0.0;
  std::size_t j = 0, o = 0;
  while (o < idx.size()) {
    while (o < idx.size() && idx[o] == j) out.values[o++] = z;
    if (o == idx.size()) break;
    z = a * z + w * (path.values[j + 1] - path.values[j]);
    ++j;
  }
  double span = (t_grid.empty() ? 0.0 : t_grid.front()) - path.t0;
  out.dropped_past = std::exp(-2.0 * prm.lambda * span);
  if (span < prm.burn_in() * (1 - 1e-12))
    out.warning = "burn-in " + std::to_string(span) + " shorter than " + std::to_string(prm.burn_in()) +
                  ": dropped past variance fraction " + std::to_string(out.dropped_past);
  return out;
}

// Per-mode grid for the stochastic Stokes family: step base_dt / 2^j with j the
// least such that |k|^2 step <= 1/4, start -T_burn rounded to that step.
// Any multiple of base_dt in [0, t_end] is then a grid point of every mode.
inline FbmFamily::Layout stokes_layout(double base_dt, double t_end, double trunc_tol = 1e-8) {
  require(base_dt > 0.0 && t_end >= 0.0, "stokes layout: need base_dt > 0, t_end >= 0");
  return [=](Wave k) {
    double lam = static_cast<double>(k.norm2());
    double d = base_dt;
    while (lam * d > kMaxRateStep) d *= 0.5;
    FouParams p{lam, 0.5, trunc_tol};
    auto burn = static_cast<std::size_t>(std::ceil(p.burn_in() / d - 1e-9));
    auto run = static_cast<std::size_t>(std::llround(t_end / d));
    return ModeGrid{-static_cast<double>(burn) * d, d, burn + run};
  };
}

inline FbmFamily stokes_family(double h, int cutoff, double base_dt, double t_end, std::uint64_t seed,
                               double trunc_tol = 1e-8) {
  return FbmFamily(h, cutoff, seed, stokes_layout(base_dt, t_end, trunc_tol));
}

// z(t) = sum_k z_k(t) h_k at each requested time, with z_k the complex fOU of
// rate |k|^2 driven by the family's beta_k.
template <class Family>
Trajectory sample_z_field(const Family& family, const std::vector<double>& times) {
  const int n = family.cutoff();
  Trajectory tr;
  tr.times = times;
  tr.fields.assign(times.size(), FourierField(n));
  FourierField probe(n);
  probe.for_each_upper([&](Wave k, cplx) {
    auto [re, im] = family.paths(k);
    FouParams prm{static_cast<double>(k.norm2()), family.hurst()};
    FouSamples a = sample_fou_path(prm, re, times);
    FouSamples b = sample_fou_path(prm, im, times);
    for (std::size_t i = 0; i < times.size(); ++i) tr.fields[i].at_upper(k) = cplx(a.values[i], b.values[i]);
  });
  return tr;
}

// z(0) over independent replicas of a scalar fOU at rate lambda, each started
// from zero at -T_burn on a grid of step 1/(refine lambda).
inline std::vector<double> fou_stationary_samples(double lambda, double h, std::size_t replicas, std::uint64_t seed,
                                                  double refine = 16.0) {
  require(refine >= 1.0 / kMaxRateStep, "fou samples: refine must be >= 4");
  FouParams prm{lambda, h};
  const double d = 1.0 / (refine * lambda);
  auto steps = static_cast<std::size_t>(std::ceil(prm.burn_in() / d));
  FgnSampler sampler(h, steps);
  std::vector<double> out(replicas);
  std::vector<double> a, b;
  const std::vector<double> t0 = {0.0};
  for (std::size_t r = 0; r < replicas; r += 2) {
    CounterRng rng(stream_key(seed, static_cast<std::int64_t>(r / 2)));
    sampler.sample_pair(rng, a, b);
    double start = -static_cast<double>(steps) * d;
    out[r] = sample_fou_path(prm, fbm_from_increments(a, h, start, d), t0).values[0];
    if (r + 1 < replicas) out[r + 1] = sample_fou_path(prm, fbm_from_increments(b, h, start, d), t0).values[0];
  }
  return out;
}

struct FouVarianceCheck {
  double lambda = 0, hurst = 0;
  Estimate empirical;
  double theory = 0;  // C_H lambda^{-2H}
  bool pass = false;
};

inline FouVarianceCheck fou_variance_check(double lambda, double h, std::size_t replicas, std::uint64_t seed,
                                           double sigmas = 4.0) {
  FouVarianceCheck c{lambda, h, variance_se(fou_stationary_samples(lambda, h, replicas, seed)),
                     ch_cached(h) * std::pow(lambda, -2 * h)};
  c.pass = c.empirical.within(c.theory, sigmas);
  return c;
}

}  // namespace fns2d
