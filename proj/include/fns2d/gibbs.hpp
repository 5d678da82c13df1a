#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bilinear.hpp"
#include "fou.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace fns2d {

// E|z_k|^2 for every k in the square, both halves, as a dense table.
class Spectrum {
 public:
  Spectrum(int cutoff, const std::function<double(Wave)>& s)
      : n_(cutoff), w_(2 * cutoff + 1), s_(static_cast<std::size_t>(w_) * w_, 0.0) {
    for (int a = -n_; a <= n_; ++a)
      for (int b = -n_; b <= n_; ++b) {
        Wave k{a, b};
        if (k.is_zero()) continue;
        double v = s(k.is_upper() ? k : -k);
        require(v >= 0.0, "spectrum: negative mode variance");
        s_[idx(k)] = v;
      }
  }
  int cutoff() const { return n_; }
  // Zero outside the square and at 0.
  double operator()(Wave k) const { return k.in_square(n_) ? s_[idx(k)] : 0.0; }

 private:
  std::size_t idx(Wave k) const { return static_cast<std::size_t>(k.k1 + n_) * w_ + (k.k2 + n_); }
  int n_, w_;
  std::vector<double> s_;
};

// Gaussian law mu^H of the stationary Stokes process: independent modes with
// each real component N(0, C_H |k|^{-4H}).
struct GibbsSpec {
  double hurst = 0.5;
  int cutoff = 8;
  double ch = 0.0;

  static GibbsSpec make(double h, int cutoff) {
    check_hurst(h);
    require(cutoff >= 1, "gibbs: cutoff must be >= 1");
    return {h, cutoff, ch_cached(h)};
  }
  double component_variance(Wave k) const { return ch * std::pow(static_cast<double>(k.norm2()), -2.0 * hurst); }
  Spectrum spectrum() const {
    return Spectrum(cutoff, [this](Wave k) { return 2.0 * component_variance(k); });
  }
};

// One draw from a product Gaussian with E|z_k|^2 = s(k), circular per mode.
inline FourierField sample_gaussian(const Spectrum& s, std::uint64_t seed, std::uint64_t draw) {
  FourierField z(s.cutoff());
  CounterRng rng(stream_key(seed, static_cast<std::int64_t>(draw)));
  z.for_each_upper_mut([&](Wave k, cplx& c) {
    double sd = std::sqrt(0.5 * s(k));
    double x = rng.normal(), y = rng.normal();
    c = sd * cplx(x, y);
  });
  return z;
}

inline FourierField sample_mu(const GibbsSpec& spec, std::uint64_t seed, std::uint64_t draw = 0) {
  return sample_gaussian(spec.spectrum(), seed, draw);
}

inline void require_bzz_hurst(double h) {
  if (!(h > 0.25 && h < 1.0))
    throw PreconditionError("B(z,z) moments need H > 1/4 (and H < 1), got H=" + std::to_string(h));
}

// Pairing kernel of E|B_k|^2: the two Wick pairings give
// gamma_{h,k} (gamma_{h,k} + gamma_{k-h,k}) s_h s_{k-h}.
inline double bzz_mode_second_moment(const Spectrum& s, Wave k) {
  const int n = s.cutoff();
  double acc = 0.0;
  for (int a = std::max(-n, k.k1 - n); a <= std::min(n, k.k1 + n); ++a)
    for (int b = std::max(-n, k.k2 - n); b <= std::min(n, k.k2 + n); ++b) {
      Wave h{a, b};
      if (h.is_zero() || h == k) continue;
      double w = s(h) * s(k - h);
      if (w == 0.0) continue;
      double g = gamma_coeff(h, k);
      acc += g * (g + gamma_coeff(k - h, k)) * w;
    }
  return acc;
}

// E ||B(z,z)||^2_{H^rho} for z ~ s, same truncation as bilinear_direct.
inline double bzz_second_moment_series(const Spectrum& s, double rho) {
  const int n = s.cutoff();
  double acc = 0.0;
  FourierField probe(n);
  probe.for_each_upper([&](Wave k, cplx) {
    acc += std::pow(static_cast<double>(k.norm2()), rho) * bzz_mode_second_moment(s, k);
  });
  return 2.0 * acc;
}

struct MomentReport {
  double hurst = 0, rho = 0;
  int m = 1;
  int cutoff = 0;
  double series_value = 0;
  Estimate mc;
  std::size_t samples = 0;

  bool agrees(double sigmas) const { return mc.within(series_value, sigmas); }
};

// Samples of ||B(z,z)||^2_{H^rho}.
inline std::vector<double> bzz_norm2_samples(const Spectrum& s, double rho, std::size_t samples, std::uint64_t seed) {
  std::vector<double> x(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    FourierField z = sample_gaussian(s, seed, i);
    x[i] = std::pow(sobolev_norm(bilinear_fft(z, z), rho), 2);
  }
  return x;
}

inline MomentReport bzz_second_moment(const GibbsSpec& spec, double rho, std::size_t samples, std::uint64_t seed) {
  require_bzz_hurst(spec.hurst);
  Spectrum s = spec.spectrum();
  MomentReport r{spec.hurst, rho, 1, spec.cutoff, bzz_second_moment_series(s, rho), {}, samples};
  if (samples >= 2) r.mc = mean_se(bzz_norm2_samples(s, rho, samples, seed));
  return r;
}

}  // namespace fns2d
