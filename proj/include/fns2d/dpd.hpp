#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bilinear.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "fou.hpp"
#include "physical.hpp"
#include "rng.hpp"
#include "trajectory.hpp"

namespace fns2d {

// Exponents of the local fixed-point space L^beta(B^alpha_pq) cap C(B^sigma_pq).
struct LocalParams {
  double alpha = 0.0, sigma = 0.0, beta = 2.0, p = 2.0, q = 2.0;
};

// H = 7/16 + c, 0 < c < 1/16.
inline LocalParams sample_point(double h) {
  const double c = h - 7.0 / 16.0;
  require(c > 0.0 && c < 1.0 / 16.0, "sample point: need 7/16 < H < 1/2, got H=" + std::to_string(h));
  LocalParams lp;
  lp.alpha = 0.25 - 2 * c;
  lp.sigma = -0.25 + 3 * c;
  lp.beta = lp.q = 2.0 / (0.5 - 4 * c);
  lp.p = 2.0 / (0.25 - c);
  return lp;
}

struct ConditionVerdict {
  bool base_ok = false;              // 1/4 < H < 1/2, beta, p >= 1, q >= 2
  std::vector<int> violated;         // indices 1..9
  std::array<double, 9> margins{};   // >= 0 side of each inequality, strict where strict

  bool ok() const { return base_ok && violated.empty(); }
};

inline ConditionVerdict check_parameter_conditions(double h, const LocalParams& x) {
  ConditionVerdict v;
  v.base_ok = h > 0.25 && h < 0.5 && x.beta >= 1.0 && x.p >= 1.0 && x.q >= 2.0;
  const double tp = 2.0 / x.p, tb = 2.0 / x.beta, tq = 2.0 / x.q;
  v.margins = {x.sigma + 1 - tp - tb,
               x.alpha + 1 - tp - tq,
               x.beta - x.q,
               tp - x.alpha,
               tp - x.sigma,
               x.alpha + x.sigma,
               x.sigma + tb - x.alpha,
               x.sigma + 1 - x.alpha,
               4 * (h - 0.5) - x.sigma};
  for (int i = 0; i < 9; ++i) {
    bool weak = i == 2 || i == 7;  // (3) and (8) are non-strict
    if (weak ? v.margins[i] < 0.0 : v.margins[i] <= 0.0) v.violated.push_back(i + 1);
  }
  return v;
}

struct FeasibleSearch {
  bool found = false;
  LocalParams point;
  std::size_t visited = 0;
};

// Grid search over (sigma, alpha, 2/beta, 2/p) with 2/q = 2/beta. That choice
// loses nothing: only (2) and (3) involve q, (2) is easiest at the smallest
// 2/q and (3) caps it at 2/beta. 2/p is then any grid point in the open window
// left by (1), (2), (4), (5).
inline FeasibleSearch grid_search_feasible(double h, double step = 1.0 / 256) {
  require(step > 0.0 && step < 0.5, "grid search: step must lie in (0, 1/2)");
  FeasibleSearch out;
  if (!(h > 0.25 && h < 0.5)) return out;
  const long n = std::lround(1.0 / step);
  const double sig_max = 4 * (h - 0.5);
  for (long is = -n; is < 0; ++is) {
    const double sigma = is * step;
    if (sigma >= sig_max) break;
    for (long ia = 0; ia <= 2 * n; ++ia) {
      const double alpha = ia * step;
      if (alpha + sigma <= 0.0) continue;
      if (alpha > sigma + 1.0) break;
      for (long ib = 1; ib < n; ++ib) {
        const double tb = ib * step;
        ++out.visited;
        if (alpha >= sigma + tb) continue;
        double lo = std::max(alpha, sigma), hi = std::min(sigma + 1.0 - tb, alpha + 1.0 - tb);
        long ip = static_cast<long>(std::floor(lo / step)) + 1;
        double tp = ip * step;
        if (tp >= hi || tp > 2.0) continue;
        LocalParams x{alpha, sigma, 2.0 / tb, 2.0 / tp, 2.0 / tb};
        if (check_parameter_conditions(h, x).ok()) {
          out.found = true;
          out.point = x;
          return out;
        }
      }
    }
  }
  return out;
}

enum class Scheme { exponential_euler, imex };

struct SolverConfig {
  double hurst = 0.75;
  int cutoff = 16;
  double dt = 1e-3;
  double t_final = 1.0;
  Scheme scheme = Scheme::exponential_euler;
  double picard_tol = 1e-10;
  int picard_max_iter = 200;
  double blowup_threshold = 1e6;
  double sigma = 0.4;
  double alpha = 0.0, beta = 2.0, p = 2.0, q = 2.0;
  std::size_t snap_every = 0;  // 0: first and last state only

  LocalParams local() const { return {alpha, sigma, beta, p, q}; }
  void set_local(const LocalParams& x) {
    alpha = x.alpha;
    sigma = x.sigma;
    beta = x.beta;
    p = x.p;
    q = x.q;
  }
};

inline ConditionVerdict check_parameter_conditions(const SolverConfig& cfg) {
  return check_parameter_conditions(cfg.hurst, cfg.local());
}

inline void check_global_regime(const SolverConfig& cfg) {
  require(cfg.hurst > 0.5 && cfg.hurst < 1.0, "global solve: need 1/2 < H < 1, got H=" + std::to_string(cfg.hurst));
  require(cfg.sigma > 0.0 && cfg.sigma < 2 * (cfg.hurst - 0.5),
          "global solve: need 0 < sigma < 2(H-1/2), got sigma=" + std::to_string(cfg.sigma));
}

// Seeded field with |v_k| ~ amplitude |k|^{-decay} times a standard complex normal.
inline FourierField random_smooth_field(int cutoff, std::uint64_t seed, double amplitude = 1.0, double decay = 2.0) {
  FourierField v(cutoff);
  CounterRng rng(stream_key(seed, 0x5eed));
  v.for_each_upper_mut([&](Wave k, cplx& c) {
    double a = amplitude * std::pow(k.norm(), -decay);
    double x = rng.normal(), y = rng.normal();
    c = a * cplx(x, y);
  });
  return v;
}

// One step of the linear part with the forcing f frozen over the step:
// exponential Euler is exact for piecewise-constant f, IMEX Euler is not.
inline FourierField linear_step(const FourierField& u, const FourierField& f, double dt, Scheme scheme) {
  FourierField out(u.cutoff());
  out.for_each_upper_mut([&](Wave k, cplx& c) {
    const double lam = static_cast<double>(k.norm2());
    if (scheme == Scheme::exponential_euler) {
      const double e = std::exp(-lam * dt);
      c = e * u.at_upper(k) + dt * phi1(lam * dt) * f.at_upper(k);
    } else {
      c = (u.at_upper(k) + dt * f.at_upper(k)) / (1.0 + lam * dt);
    }
  });
  return out;
}

// Nonlinear data at one time: B(v, v) for v = u + z, split as B(v, u) + B(v, z).
struct NonlinearTerms {
  FourierField b_vu, b_vz;
  double transport = 0.0;   // <B(u + z, u), u>
  double production = 0.0;  // -<B(v, v), u>

  FourierField forcing() const {
    FourierField f = b_vu;
    f += b_vz;
    f *= -1.0;
    return f;
  }
};

inline NonlinearTerms nonlinear_terms(const FourierField& u, const FourierField& z) {
  FourierField v = u;
  v += z;
  NonlinearTerms t{bilinear_fft(v, u), bilinear_fft(v, z)};
  t.transport = inner(t.b_vu, u);
  t.production = -t.transport - inner(t.b_vz, u);
  return t;
}

// Indices into z for a solver step dt: z.times[stride * i] = i * dt.
inline std::size_t forcing_stride(const Trajectory& z, double dt, std::size_t steps) {
  require(z.size() >= 2, "forcing: trajectory needs at least two times");
  const double dz = z.times[1] - z.times[0];
  const auto stride = static_cast<std::size_t>(std::llround(dt / dz));
  require(stride >= 1 && std::abs(stride * dz - dt) < 1e-9 * dt,
          "forcing: solver dt is not a multiple of the forcing grid step");
  require(stride * steps < z.size(), "forcing: trajectory ends before t_final");
  for (std::size_t i = 0; i <= steps; ++i)
    require(std::abs(z.times[stride * i] - static_cast<double>(i) * dt) < 1e-9 * std::max(1.0, i * dt),
            "forcing: grid mismatch at step " + std::to_string(i));
  return stride;
}

inline Trajectory zero_forcing(int cutoff, double dt, std::size_t steps) {
  Trajectory z;
  z.times = uniform_times(dt, steps);
  z.fields.assign(z.times.size(), FourierField(cutoff));
  return z;
}

struct StepDiagnostics {
  double t = 0.0;
  double l2 = 0.0;          // ||u||_{H^0}
  double grad = 0.0;        // ||grad u||_{L^2}
  double sigma_norm = 0.0;  // ||u||_{H^sigma}
  double v_sigma = 0.0;     // ||u + z||_{H^sigma}
  double z_sigma = 0.0;
  double production = 0.0;
  double transport = 0.0;
  // (1/2 ||u_i||^2 - 1/2 ||u_{i-1}||^2)/dt + ||grad u_{i-1}||^2 - production_{i-1}; 0 at i = 0.
  double energy_residual = 0.0;
};

// Advances u = v - z one step at a time.
class Stepper {
 public:
  Stepper(const SolverConfig& cfg, FourierField u0) : cfg_(cfg), u_(std::move(u0)) {
    require(u_.cutoff() == cfg.cutoff, "stepper: initial field cutoff differs from config");
  }

  const FourierField& state() const { return u_; }

  NonlinearTerms step(const FourierField& z) {
    NonlinearTerms nt = nonlinear_terms(u_, z);
    u_ = linear_step(u_, nt.forcing(), cfg_.dt, cfg_.scheme);
    return nt;
  }

 private:
  SolverConfig cfg_;
  FourierField u_;
};

struct SolveResult {
  Trajectory u;  // snapshots every snap_every steps, plus t = 0 and the last state
  std::vector<StepDiagnostics> diagnostics;
  bool blew_up = false;
  double stopped_at = std::numeric_limits<double>::quiet_NaN();
  double sup_sigma = 0.0;

  bool stopped() const { return !std::isnan(stopped_at); }
};

inline StepDiagnostics diagnose(double t, const FourierField& u, const FourierField& z, double sigma) {
  FourierField v = u;
  v += z;
  StepDiagnostics d;
  d.t = t;
  d.l2 = sobolev_norm(u, 0.0);
  d.grad = std::sqrt(dissipation(u));
  d.sigma_norm = sobolev_norm(u, sigma);
  d.v_sigma = sobolev_norm(v, sigma);
  d.z_sigma = sobolev_norm(z, sigma);
  return d;
}

// Time marching without regime checks; global_solve and the Picard
// cross-check both run on this.
inline SolveResult march(const SolverConfig& cfg, const FourierField& u0, const Trajectory& z) {
  const std::size_t steps = steps_for(cfg.t_final, cfg.dt);
  const std::size_t stride = forcing_stride(z, cfg.dt, steps);
  require(z.fields.front().cutoff() == cfg.cutoff, "solve: forcing cutoff differs from config");
  SolveResult r;
  Stepper st(cfg, u0);
  auto snap = [&](std::size_t i) {
    r.u.times.push_back(static_cast<double>(i) * cfg.dt);
    r.u.fields.push_back(st.state());
  };
  snap(0);
  StepDiagnostics cur = diagnose(0.0, st.state(), z.fields[0], cfg.sigma);
  for (std::size_t i = 0; i < steps; ++i) {
    const double e0 = 0.5 * cur.l2 * cur.l2, g0 = cur.grad * cur.grad;
    NonlinearTerms nt = st.step(z.fields[stride * i]);
    cur.production = nt.production;
    cur.transport = nt.transport;
    r.diagnostics.push_back(cur);
    r.sup_sigma = std::max(r.sup_sigma, cur.sigma_norm);

    const double t = static_cast<double>(i + 1) * cfg.dt;
    cur = diagnose(t, st.state(), z.fields[stride * (i + 1)], cfg.sigma);
    cur.energy_residual = (0.5 * cur.l2 * cur.l2 - e0) / cfg.dt + g0 - nt.production;
    if (!std::isfinite(cur.sigma_norm) || cur.sigma_norm > cfg.blowup_threshold) {
      r.blew_up = true;
      r.stopped_at = t;
      r.diagnostics.push_back(cur);
      snap(i + 1);
      return r;
    }
    if ((cfg.snap_every > 0 && (i + 1) % cfg.snap_every == 0) || i + 1 == steps) snap(i + 1);
  }
  r.diagnostics.push_back(cur);
  r.sup_sigma = std::max(r.sup_sigma, cur.sigma_norm);
  return r;
}

// u(0) = v0 - z(0), then march.
inline SolveResult global_solve(const SolverConfig& cfg, const FourierField& v0, const Trajectory& z) {
  check_global_regime(cfg);
  FourierField u0 = v0;
  u0 -= z.fields.at(0);
  return march(cfg, u0, z);
}

// v = u + z at the times of u; u's times must appear in z.
inline Trajectory reconstruct_v(const Trajectory& u, const Trajectory& z) {
  require(!u.fields.empty() && !z.fields.empty(), "reconstruct: empty trajectory");
  require(u.fields.front().cutoff() == z.fields.front().cutoff(), "reconstruct: cutoff mismatch");
  Trajectory v;
  v.times = u.times;
  std::size_t j = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double tol = 1e-9 * std::max(1.0, std::abs(u.times[i]));
    while (j < z.size() && z.times[j] < u.times[i] - tol) ++j;
    require(j < z.size() && std::abs(z.times[j] - u.times[i]) <= tol,
            "reconstruct: time " + std::to_string(u.times[i]) + " missing from the forcing grid");
    FourierField f = u.fields[i];
    f += z.fields[j];
    v.fields.push_back(std::move(f));
  }
  return v;
}

// Norms in the local fixed-point space, on a grid with step dt.
struct LocalNorms {
  std::vector<double> c_part;  // ||w(t_i)||_{B^sigma_pq}
  std::vector<double> l_part;  // ||w(t_i)||_{B^alpha_pq}
};

inline LocalNorms local_norms(const std::vector<FourierField>& w, const LocalParams& x) {
  LocalNorms n;
  for (const auto& f : w) {
    n.c_part.push_back(besov_norm(f, x.sigma, x.p, x.q));
    n.l_part.push_back(besov_norm(f, x.alpha, x.p, x.q));
  }
  return n;
}

// max( max_{i<=m} C-part, (sum_{i<m} dt L-part^beta)^{1/beta} ) for every prefix m.
inline std::vector<double> prefix_e_norms(const LocalNorms& n, double dt, double beta) {
  std::vector<double> out(n.c_part.size());
  double cmax = 0.0, lsum = 0.0;
  for (std::size_t m = 0; m < out.size(); ++m) {
    cmax = std::max(cmax, n.c_part[m]);
    out[m] = std::max(cmax, std::pow(lsum, 1.0 / beta));
    lsum += dt * std::pow(n.l_part[m], beta);
  }
  return out;
}

enum class PicardStatus { converged, partial, no_contraction };

inline const char* to_string(PicardStatus s) {
  switch (s) {
    case PicardStatus::converged: return "converged";
    case PicardStatus::partial: return "partial";
    default: return "no_contraction";
  }
}

struct PicardResult {
  PicardStatus status = PicardStatus::no_contraction;
  Trajectory u;                   // last iterate on the full grid
  std::vector<double> residuals;  // E_T proxy norm of u^{(n+1)} - u^{(n)}
  std::vector<double> factors;    // residuals[n] / residuals[n-1]
  double worst_factor = 0.0;      // max over iterations and certified prefixes
  double tau = 0.0;               // certified contraction interval [0, tau]
  std::size_t tau_index = 0;
  int iterations = 0;
  std::string report;
};

// Iterates the mild-solution map on the grid. Each integral over [t_j, t_{j+1}]
// freezes B(v(t_j), v(t_j)) and integrates e^{(t-s)A} exactly. The contraction
// certificate on [0, t_m] is ratio < 1 of successive iterate differences in the
// prefix norm, for every iteration, every prefix up to m.
inline PicardResult picard_solve(const SolverConfig& cfg, const FourierField& u0, const Trajectory& z,
                                 bool override_conditions = false) {
  const LocalParams x = cfg.local();
  if (!override_conditions) {
    ConditionVerdict cv = check_parameter_conditions(cfg.hurst, x);
    if (!cv.ok()) {
      std::ostringstream os;
      os << "picard: parameter conditions fail (base_ok=" << cv.base_ok << ", violated:";
      for (int i : cv.violated) os << ' ' << i;
      os << ")";
      throw PreconditionError(os.str());
    }
  }
  require(cfg.picard_tol > 0.0 && cfg.picard_max_iter >= 1, "picard: need tol > 0 and max_iter >= 1");
  require(u0.cutoff() == cfg.cutoff, "picard: initial field cutoff differs from config");
  const std::size_t steps = steps_for(cfg.t_final, cfg.dt);
  const std::size_t stride = forcing_stride(z, cfg.dt, steps);

  PicardResult r;
  r.u.times = uniform_times(cfg.dt, steps);
  r.u.fields.reserve(steps + 1);
  r.u.fields.push_back(u0);
  for (std::size_t i = 1; i <= steps; ++i) r.u.fields.push_back(heat_semigroup(u0, i * cfg.dt));

  std::vector<double> prev_prefix;
  std::vector<bool> certified(steps + 1, true);
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    std::vector<FourierField> next;
    next.reserve(steps + 1);
    next.push_back(u0);
    for (std::size_t i = 0; i < steps; ++i) {
      FourierField f = nonlinear_terms(r.u.fields[i], z.fields[stride * i]).forcing();
      next.push_back(linear_step(next.back(), f, cfg.dt, Scheme::exponential_euler));
    }
    std::vector<FourierField> diff = next;
    for (std::size_t i = 0; i <= steps; ++i) diff[i] -= r.u.fields[i];
    std::vector<double> pre = prefix_e_norms(local_norms(diff, x), cfg.dt, x.beta);
    r.u.fields = std::move(next);
    r.iterations = it;
    const double res = pre.back();
    r.residuals.push_back(res);
    if (!std::isfinite(res) || res > cfg.blowup_threshold) {
      std::fill(certified.begin(), certified.end(), false);
      r.worst_factor = std::numeric_limits<double>::infinity();
      break;
    }
    if (!prev_prefix.empty()) {
      r.factors.push_back(prev_prefix.back() > 0.0 ? res / prev_prefix.back() : 0.0);
      for (std::size_t m = 1; m <= steps; ++m) {
        if (!certified[m]) continue;
        double k = prev_prefix[m] > 0.0 ? pre[m] / prev_prefix[m] : (pre[m] > 0.0 ? INFINITY : 0.0);
        if (k >= 1.0) certified[m] = false;
        else r.worst_factor = std::max(r.worst_factor, k);
      }
    }
    prev_prefix = std::move(pre);
    if (res < cfg.picard_tol) {
      r.status = PicardStatus::converged;
      break;
    }
  }
  std::size_t m = 0;
  while (m < steps && certified[m + 1]) ++m;
  // A single iteration gives no ratio; certify only what a ratio has checked.
  if (r.iterations < 2 && r.status != PicardStatus::converged) m = 0;
  r.tau_index = m;
  r.tau = static_cast<double>(m) * cfg.dt;
  if (r.status != PicardStatus::converged) r.status = m > 0 ? PicardStatus::partial : PicardStatus::no_contraction;
  std::ostringstream os;
  os << to_string(r.status) << ": iterations=" << r.iterations << " residual=" << r.residuals.back()
     << " tau=" << r.tau << " worst_factor=" << r.worst_factor;
  r.report = os.str();
  return r;
}

// Distance between solves started from nearby data, run in lockstep so that
// every stepper consumes the same forcing field at each step.
struct UniquenessReport {
  double replay_sup = 0.0;              // sup_t ||V||_{H^0}, identical inputs
  std::vector<double> deltas;
  std::vector<double> final_response;   // ||V(T)||_{H^0} / delta
  std::vector<double> sup_response;     // sup_t ||V(t)||_{H^0} / delta
  double control_sup = 0.0;             // sup_t ||V|| for V(0) = 0, distinct forcing
  double control_final = 0.0;
  bool blew_up = false;

  double response_spread() const {
    auto [lo, hi] = std::minmax_element(final_response.begin(), final_response.end());
    return *hi / *lo;
  }
};

inline UniquenessReport uniqueness_check(const SolverConfig& cfg, const FourierField& v0, const Trajectory& z,
                                         const Trajectory& z_control, const std::vector<double>& deltas,
                                         std::uint64_t direction_seed) {
  check_global_regime(cfg);
  require(!deltas.empty(), "uniqueness: need at least one delta");
  const std::size_t steps = steps_for(cfg.t_final, cfg.dt);
  const std::size_t stride = forcing_stride(z, cfg.dt, steps);
  const std::size_t cstride = forcing_stride(z_control, cfg.dt, steps);

  FourierField w = random_smooth_field(cfg.cutoff, direction_seed);
  w *= 1.0 / sobolev_norm(w, 0.0);

  auto u_from = [&](const FourierField& v, const Trajectory& zz) {
    FourierField u = v;
    u -= zz.fields.front();
    return u;
  };
  std::vector<Stepper> runs;
  runs.emplace_back(cfg, u_from(v0, z));
  runs.emplace_back(cfg, u_from(v0, z));
  for (double d : deltas) {
    FourierField vp = w;
    vp *= d;
    vp += v0;
    runs.emplace_back(cfg, u_from(vp, z));
  }
  runs.emplace_back(cfg, u_from(v0, z_control));
  const std::size_t ctl = runs.size() - 1;

  UniquenessReport rep;
  rep.deltas = deltas;
  rep.sup_response.assign(deltas.size(), 0.0);
  rep.final_response.assign(deltas.size(), 0.0);
  // V = v1 - v2 = u1 - u2 when both share z; the control adds z - z_control.
  auto measure = [&](std::size_t i) {
    const FourierField& base = runs[0].state();
    FourierField d = runs[1].state();
    d -= base;
    rep.replay_sup = std::max(rep.replay_sup, sobolev_norm(d, 0.0));
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      FourierField e = runs[2 + j].state();
      e -= base;
      double r = sobolev_norm(e, 0.0) / deltas[j];
      rep.sup_response[j] = std::max(rep.sup_response[j], r);
      rep.final_response[j] = r;
    }
    FourierField c = runs[ctl].state();
    c += z_control.fields[cstride * i];
    c -= base;
    c -= z.fields[stride * i];
    rep.control_final = sobolev_norm(c, 0.0);
    rep.control_sup = std::max(rep.control_sup, rep.control_final);
  };
  measure(0);
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t j = 0; j < runs.size(); ++j) runs[j].step(j == ctl ? z_control.fields[cstride * i] : z.fields[stride * i]);
    if (!std::isfinite(sobolev_norm(runs[0].state(), cfg.sigma)) ||
        sobolev_norm(runs[0].state(), cfg.sigma) > cfg.blowup_threshold) {
      rep.blew_up = true;
      break;
    }
    measure(i + 1);
  }
  return rep;
}

}  // namespace fns2d
