#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "physical.hpp"

namespace fns2d {

// gamma_{h,k} = (1/2pi) (h^perp . k) ((k-h) . k) / (|h| |k-h| |k|)
inline double gamma_coeff(Wave h, Wave k) {
  Wave r = k - h;
  if (h.is_zero() || k.is_zero() || r.is_zero())
    throw PreconditionError("gamma: degenerate triad h=(" + std::to_string(h.k1) + "," + std::to_string(h.k2) +
                            ") k=(" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")");
  double num = static_cast<double>(perp_dot(h, k)) * static_cast<double>(dot(r, k));
  return num / (2.0 * std::numbers::pi * h.norm() * r.norm() * k.norm());
}

namespace detail {

// Dense copy of all coefficients on the square, both halves, for fast lookup.
struct FullSquare {
  int n;
  std::vector<cplx> c;
  explicit FullSquare(const FourierField& v) : n(v.cutoff()), c(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1)) {
    for (int k1 = -n; k1 <= n; ++k1)
      for (int k2 = -n; k2 <= n; ++k2) c[idx({k1, k2})] = v[Wave{k1, k2}];
  }
  std::size_t idx(Wave k) const { return static_cast<std::size_t>(k.k1 + n) * (2 * n + 1) + (k.k2 + n); }
  cplx operator()(Wave k) const { return c[idx(k)]; }
};

// Direct triad sum at any k. For a lower-half k the loop visits -h in exactly the
// order used for -k, so conj(B_k) = -B_{-k} holds bitwise.
inline cplx direct_at(const FullSquare& u, const FullSquare& v, Wave k) {
  const int n = u.n;
  const bool up = k.is_upper();
  const Wave kk = up ? k : -k;
  const int s = up ? 1 : -1;
  cplx acc{};
  for (int a = std::max(-n, kk.k1 - n); a <= std::min(n, kk.k1 + n); ++a)
    for (int b = std::max(-n, kk.k2 - n); b <= std::min(n, kk.k2 + n); ++b) {
      Wave h{s * a, s * b};
      if (h.is_zero() || h == k) continue;
      acc += gamma_coeff(h, k) * (u(h) * v(k - h));
    }
  return cplx(0.0, 1.0) * acc;
}

}  // namespace detail

struct DirectProduct {
  FourierField value;
  double truncation_mass = 0.0;  // sum over N < |k|_inf <= 2N of |B_k|^2, both halves
};

inline void check_pair(const FourierField& u, const FourierField& v) {
  require(u.cutoff() == v.cutoff(), "bilinear: cutoff mismatch " + std::to_string(u.cutoff()) + " vs " +
                                        std::to_string(v.cutoff()));
}

// B(u, v)_k = i sum_h gamma_{h,k} u_h v_{k-h}, the Leray-projected (u.grad) v.
inline FourierField bilinear_direct(const FourierField& u, const FourierField& v) {
  check_pair(u, v);
  detail::FullSquare fu(u), fv(v);
  FourierField out(u.cutoff());
  out.for_each_upper_mut([&](Wave k, cplx& c) { c = detail::direct_at(fu, fv, k); });
  return out;
}

inline DirectProduct bilinear_direct_with_mass(const FourierField& u, const FourierField& v) {
  DirectProduct p{bilinear_direct(u, v), 0.0};
  detail::FullSquare fu(u), fv(v);
  const int n = u.cutoff();
  for (int k1 = -2 * n; k1 <= 2 * n; ++k1)
    for (int k2 = -2 * n; k2 <= 2 * n; ++k2) {
      Wave k{k1, k2};
      if (k.max_norm() <= n) continue;
      p.truncation_mass += std::norm(detail::direct_at(fu, fv, k));
    }
  return p;
}

// Direct coefficient at any k in the doubled square (either half), for
// checking conjugate symmetry independently of storage.
inline cplx bilinear_direct_at(const FourierField& u, const FourierField& v, Wave k) {
  check_pair(u, v);
  require(!k.is_zero() && k.max_norm() <= 2 * u.cutoff(), "bilinear_direct_at: k outside the product support");
  return detail::direct_at(detail::FullSquare(u), detail::FullSquare(v), k);
}

inline int dealias_grid(int cutoff) { return smooth_size(3 * cutoff + 1); }

// Pseudo-spectral route: (u.grad) v on an M-point grid, then projection. A
// product of two cutoff-N fields has modes up to 2N, which fold back onto
// |k| <= N only if M < 3N + 1.
inline FourierField bilinear_fft(const FourierField& u, const FourierField& v, int m = 0) {
  check_pair(u, v);
  const int n = u.cutoff();
  if (m == 0) m = dealias_grid(n);
  if (m < 3 * n + 1)
    throw AliasingError("bilinear_fft: M=" + std::to_string(m) + " aliases the quadratic product at cutoff " +
                        std::to_string(n) + ", need M >= " + std::to_string(3 * n + 1));
  const cplx I(0.0, 1.0);
  CBuffer uu = detail::scatter_pair(n, m, [&](Wave k) { return detail::velocity_coeffs(u, k); });
  CBuffer g1 = detail::scatter_pair(n, m, [&](Wave k) {
    cplx c = detail::velocity_coeffs(v, k).first;
    return std::pair{I * double(k.k1) * c, I * double(k.k2) * c};
  });
  CBuffer g2 = detail::scatter_pair(n, m, [&](Wave k) {
    cplx c = detail::velocity_coeffs(v, k).second;
    return std::pair{I * double(k.k1) * c, I * double(k.k2) * c};
  });
  for (std::size_t i = 0; i < uu.size(); ++i) {
    double a = uu[i].real(), b = uu[i].imag();
    double w1 = a * g1[i].real() + b * g1[i].imag();
    double w2 = a * g2[i].real() + b * g2[i].imag();
    uu[i] = cplx(w1, w2);
  }
  fft2_forward(uu, m);
  const double scale = 2.0 * std::numbers::pi / (static_cast<double>(m) * m);
  FourierField out(n);
  out.for_each_upper_mut([&](Wave k, cplx& c) {
    auto [a, b] = detail::unpack(uu, m, k);
    c = scale * (a * static_cast<double>(-k.k2) + b * static_cast<double>(k.k1)) / k.norm();
  });
  return out;
}

// <B(u1, u2), u3> in L^2. Only |k| <= N of the product meets u3, and the
// dealiased grid computes those modes exactly.
inline double trilinear(const FourierField& u1, const FourierField& u2, const FourierField& u3) {
  return inner(bilinear_fft(u1, u2), u3);
}

}  // namespace fns2d
