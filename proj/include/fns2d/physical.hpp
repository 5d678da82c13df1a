#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fft.hpp"
#include "field.hpp"

namespace fns2d {

// Velocity sampled at x_{ij} = 2pi (i, j)/M, row-major in i (the x1 index).
struct VectorGrid {
  int m = 0;
  std::vector<double> u1, u2;

  explicit VectorGrid(int size = 0)
      : m(size), u1(static_cast<std::size_t>(size) * size), u2(static_cast<std::size_t>(size) * size) {}
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * m + j; }
};

inline int min_grid(int cutoff) { return 2 * cutoff + 2; }

namespace detail {

inline void check_grid(int n, int m) {
  if (m < min_grid(n))
    throw AliasingError("grid M=" + std::to_string(m) + " cannot hold cutoff " + std::to_string(n) +
                        " without aliasing, need M >= " + std::to_string(min_grid(n)));
}

// Scatter the two Cartesian components, times an optional Fourier multiplier,
// into one complex array so that a single backward FFT yields both.
// comp(k) returns the pair of complex physical-space coefficients at k.
template <class Comp>
CBuffer scatter_pair(int n, int m, Comp&& comp) {
  CBuffer buf(static_cast<std::size_t>(m) * m);
  for (int k1 = -n; k1 <= n; ++k1)
    for (int k2 = -n; k2 <= n; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      auto [a, b] = comp(Wave{k1, k2});
      buf[static_cast<std::size_t>(wrap(k1, m)) * m + wrap(k2, m)] = a + cplx(0.0, 1.0) * b;
    }
  fft2_backward(buf, m);
  return buf;
}

// Physical-space Fourier coefficients of the two velocity components at k:
// c_k = v_k k^perp / (2pi |k|).
inline std::pair<cplx, cplx> velocity_coeffs(const FourierField& v, Wave k) {
  cplx c = v[k] / (2.0 * std::numbers::pi * k.norm());
  return {c * static_cast<double>(-k.k2), c * static_cast<double>(k.k1)};
}

// Split F = FFT(a + i b) of two real fields into FFT(a)_k, FFT(b)_k.
inline std::pair<cplx, cplx> unpack(const CBuffer& f, int m, Wave k) {
  cplx p = f[static_cast<std::size_t>(wrap(k.k1, m)) * m + wrap(k.k2, m)];
  cplx q = std::conj(f[static_cast<std::size_t>(wrap(-k.k1, m)) * m + wrap(-k.k2, m)]);
  return {0.5 * (p + q), cplx(0.0, -0.5) * (p - q)};
}

}  // namespace detail

inline VectorGrid to_physical(const FourierField& v, int m) {
  detail::check_grid(v.cutoff(), m);
  CBuffer buf = detail::scatter_pair(v.cutoff(), m, [&](Wave k) { return detail::velocity_coeffs(v, k); });
  VectorGrid g(m);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    g.u1[i] = buf[i].real();
    g.u2[i] = buf[i].imag();
  }
  return g;
}

// Leray projection of an arbitrary real vector field onto span{h_k : |k|_inf <= n}.
inline FourierField from_physical(const VectorGrid& g, int n) {
  detail::check_grid(n, g.m);
  const int m = g.m;
  CBuffer buf(static_cast<std::size_t>(m) * m);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cplx(g.u1[i], g.u2[i]);
  fft2_forward(buf, m);
  const double scale = 2.0 * std::numbers::pi / (static_cast<double>(m) * m);
  FourierField v(n);
  v.for_each_upper_mut([&](Wave k, cplx& c) {
    auto [a, b] = detail::unpack(buf, m, k);
    c = scale * (a * static_cast<double>(-k.k2) + b * static_cast<double>(k.k1)) / k.norm();
  });
  return v;
}

// sum_ij |u(x_ij)|^2 (2pi/M)^2, which equals ||v||_{H^0}^2 for band-limited v.
inline double grid_l2_squared(const VectorGrid& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.u1.size(); ++i) s += g.u1[i] * g.u1[i] + g.u2[i] * g.u2[i];
  double h = 2.0 * std::numbers::pi / g.m;
  return s * h * h;
}

inline double grid_lp_norm(const VectorGrid& g, double p) {
  double h2 = std::pow(2.0 * std::numbers::pi / g.m, 2);
  if (std::isinf(p)) {
    double mx = 0.0;
    for (std::size_t i = 0; i < g.u1.size(); ++i) mx = std::max(mx, std::hypot(g.u1[i], g.u2[i]));
    return mx;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < g.u1.size(); ++i) s += std::pow(std::hypot(g.u1[i], g.u2[i]), p);
  return std::pow(s * h2, 1.0 / p);
}

// Sharp dyadic shell index: 4^j <= |k|^2 < 4^{j+1}.
inline int dyadic_shell(Wave k) {
  long long n2 = k.norm2();
  int j = 0;
  while (n2 >= 4LL << (2 * j)) ++j;
  return j;
}

struct NormSpec {
  enum class Kind { sobolev, besov } kind = Kind::sobolev;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;

  static NormSpec sobolev(double s) { return {Kind::sobolev, s, 2.0, 2.0}; }
  static NormSpec besov(double s, double p, double q) { return {Kind::besov, s, p, q}; }
};

// Dyadic-shell Besov proxy: l^q over shells of 2^{js} ||Delta_j v||_{L^p}, with
// each block's L^p norm taken on the grid. At p = q = 2 this is within the
// factor max(1, 2^{-s}) of the Sobolev norm, from below by min(1, 2^{-s}).
inline double besov_norm(const FourierField& v, double s, double p, double q, int m = 0) {
  require(p >= 1.0 && q >= 1.0, "besov_norm: need p, q >= 1");
  const int n = v.cutoff();
  if (m == 0) m = smooth_size(min_grid(n));
  int jmax = dyadic_shell(Wave{n, n});
  std::vector<double> blocks(static_cast<std::size_t>(jmax) + 1, 0.0);
  for (int j = 0; j <= jmax; ++j) {
    FourierField shell(n);
    bool any = false;
    v.for_each_upper([&](Wave k, cplx c) {
      if (dyadic_shell(k) == j && c != cplx{}) {
        shell.at_upper(k) = c;
        any = true;
      }
    });
    if (!any) continue;
    // Parseval makes the p = 2 grid norm exact, so skip the transform.
    double lp = p == 2.0 ? sobolev_norm(shell, 0.0) : grid_lp_norm(to_physical(shell, m), p);
    blocks[static_cast<std::size_t>(j)] = std::pow(2.0, j * s) * lp;
  }
  if (std::isinf(q)) {
    double mx = 0.0;
    for (double b : blocks) mx = std::max(mx, b);
    return mx;
  }
  double acc = 0.0;
  for (double b : blocks) acc += std::pow(b, q);
  return std::pow(acc, 1.0 / q);
}

inline double norm(const FourierField& v, const NormSpec& spec) {
  return spec.kind == NormSpec::Kind::sobolev ? sobolev_norm(v, spec.s) : besov_norm(v, spec.s, spec.p, spec.q);
}

}  // namespace fns2d
