#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "wave.hpp"

namespace fns2d {

using cplx = std::complex<double>;

// Divergence-free, mean-zero real vector field on the 2-torus, written in the
// basis h_k = (1/2pi) k^perp/|k| e^{i k.x}. Reality forces v_{-k} = -conj(v_k),
// so only the upper half-lattice is stored. Truncation is the square
// max(|k1|,|k2|) <= cutoff.
class FourierField {
 public:
  FourierField() = default;
  explicit FourierField(int cutoff) : n_(cutoff), data_(static_cast<std::size_t>(cutoff + 1) * (2 * cutoff + 1)) {
    require(cutoff >= 1, "cutoff must be >= 1, got " + std::to_string(cutoff));
  }

  int cutoff() const { return n_; }

  // Any k: zero outside the square and at k = 0; lower half via reality.
  cplx operator[](Wave k) const {
    if (!k.in_square(n_)) return {};
    if (k.is_upper()) return data_[slot(k)];
    return -std::conj(data_[slot(-k)]);
  }

  void set(Wave k, cplx v) {
    require(k.in_square(n_), "mode (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                                 ") outside cutoff " + std::to_string(n_));
    if (k.is_upper())
      data_[slot(k)] = v;
    else
      data_[slot(-k)] = -std::conj(v);
  }

  // Unchecked access to a stored upper-half coefficient.
  cplx& at_upper(Wave k) { return data_[slot(k)]; }
  const cplx& at_upper(Wave k) const { return data_[slot(k)]; }

  template <class F>
  void for_each_upper(F&& f) const {
    for (int k1 = 0; k1 <= n_; ++k1)
      for (int k2 = (k1 == 0 ? 1 : -n_); k2 <= n_; ++k2) f(Wave{k1, k2}, data_[slot({k1, k2})]);
  }
  template <class F>
  void for_each_upper_mut(F&& f) {
    for (int k1 = 0; k1 <= n_; ++k1)
      for (int k2 = (k1 == 0 ? 1 : -n_); k2 <= n_; ++k2) f(Wave{k1, k2}, data_[slot({k1, k2})]);
  }

  std::size_t mode_count() const { return static_cast<std::size_t>(((2 * n_ + 1) * (2 * n_ + 1) - 1) / 2); }

  // Zero-padded or truncated copy.
  FourierField with_cutoff(int n) const {
    FourierField out(n);
    int m = std::min(n, n_);
    for (int k1 = 0; k1 <= m; ++k1)
      for (int k2 = (k1 == 0 ? 1 : -m); k2 <= m; ++k2) out.at_upper({k1, k2}) = at_upper({k1, k2});
    return out;
  }

  FourierField& operator+=(const FourierField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  FourierField& operator-=(const FourierField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  FourierField& operator*=(double a) {
    for (auto& c : data_) c *= a;
    return *this;
  }
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(double a, FourierField b) { return b *= a; }

  bool operator==(const FourierField& o) const = default;

  // Raw storage, including unused slots (k1 = 0, k2 <= 0) which stay zero.
  const std::vector<cplx>& raw() const { return data_; }
  std::vector<cplx>& raw() { return data_; }

 private:
  std::size_t slot(Wave k) const {
    return static_cast<std::size_t>(k.k1) * (2 * n_ + 1) + static_cast<std::size_t>(k.k2 + n_);
  }
  void check_same(const FourierField& o) const {
    require(o.n_ == n_, "cutoff mismatch: " + std::to_string(n_) + " vs " + std::to_string(o.n_));
  }

  int n_ = 0;
  std::vector<cplx> data_;
};

// ||v||_{H^r}^2 = sum over all nonzero k of |k|^{2r} |v_k|^2.
inline double sobolev_norm(const FourierField& v, double r) {
  double s = 0.0;
  v.for_each_upper([&](Wave k, cplx c) { s += std::pow(static_cast<double>(k.norm2()), r) * std::norm(c); });
  return std::sqrt(2.0 * s);
}

// ||grad v||^2 in L^2, i.e. ||v||_{H^1}^2.
inline double dissipation(const FourierField& v) {
  double s = 0.0;
  v.for_each_upper([&](Wave k, cplx c) { s += static_cast<double>(k.norm2()) * std::norm(c); });
  return 2.0 * s;
}

// L^2 inner product <u, v> for real fields; real by reality of both.
inline double inner(const FourierField& u, const FourierField& v) {
  require(u.cutoff() == v.cutoff(), "inner: cutoff mismatch");
  double s = 0.0;
  u.for_each_upper([&](Wave k, cplx c) { s += (c * std::conj(v.at_upper(k))).real(); });
  return 2.0 * s;
}

// e^{tA} with A = Laplacian: each mode damped by e^{-|k|^2 t}.
inline FourierField heat_semigroup(const FourierField& v, double t) {
  require(t >= 0.0, "heat_semigroup: negative time " + std::to_string(t));
  FourierField out = v;
  out.for_each_upper_mut([&](Wave k, cplx& c) { c *= std::exp(-static_cast<double>(k.norm2()) * t); });
  return out;
}

}  // namespace fns2d
