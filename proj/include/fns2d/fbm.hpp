#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "rng.hpp"
#include "wave.hpp"

namespace fns2d {

inline void check_hurst(double h) {
  if (!(h > 0.0 && h < 1.0)) throw PreconditionError("Hurst index must lie in (0,1), got " + std::to_string(h));
}

// E[b(t) b(s)] for one-sided fBm with b(0) = 0.
inline double fbm_covariance(double t, double s, double h) {
  return 0.5 * (std::pow(std::abs(t), 2 * h) + std::pow(std::abs(s), 2 * h) - std::pow(std::abs(t - s), 2 * h));
}

// Autocovariance of unit-spacing fractional Gaussian noise.
inline double fgn_autocov(long n, double h) {
  double a = std::abs(static_cast<double>(n));
  return 0.5 * (std::pow(a + 1, 2 * h) + std::pow(std::abs(a - 1), 2 * h) - 2 * std::pow(a, 2 * h));
}

struct FbmPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;  // b(t0 + i dt), values[0] = 0

  std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
  double t_end() const { return t0 + dt * static_cast<double>(steps()); }
};

// Draws L consecutive unit-spacing fGn increments, two independent paths per
// call. Circulant embedding when its spectrum is nonnegative, otherwise a
// dense Cholesky factor of the Toeplitz covariance.
class FgnSampler {
 public:
  static constexpr std::size_t kCholeskyLimit = 4096;

  FgnSampler(double h, std::size_t len, bool force_cholesky = false) : h_(h), len_(len) {
    check_hurst(h);
    require(len >= 1, "fGn sampler: need at least one increment");
    if (!force_cholesky && build_circulant()) return;
    build_cholesky();
  }

  bool uses_circulant() const { return !sqrt_eig_.empty(); }
  std::size_t length() const { return len_; }
  double hurst() const { return h_; }

  void sample_pair(CounterRng& rng, std::vector<double>& a, std::vector<double>& b) const {
    a.assign(len_, 0.0);
    b.assign(len_, 0.0);
    if (uses_circulant()) {
      const std::size_t m = sqrt_eig_.size();
      CBuffer w(m);
      for (std::size_t j = 0; j < m; ++j) {
        double x = rng.normal();
        double y = rng.normal();
        w[j] = sqrt_eig_[j] * std::complex<double>(x, y);
      }
      fft1_forward(w);
      for (std::size_t i = 0; i < len_; ++i) {
        a[i] = w[i].real();
        b[i] = w[i].imag();
      }
      return;
    }
    std::vector<double> za(len_), zb(len_);
    for (std::size_t i = 0; i < len_; ++i) {
      za[i] = rng.normal();
      zb[i] = rng.normal();
    }
    for (std::size_t i = 0; i < len_; ++i) {
      const double* row = &chol_[i * len_];
      double sa = 0.0, sb = 0.0;
      for (std::size_t j = 0; j <= i; ++j) {
        sa += row[j] * za[j];
        sb += row[j] * zb[j];
      }
      a[i] = sa;
      b[i] = sb;
    }
  }

 private:
  bool build_circulant() {
    std::size_t n = 1;
    while (n < len_) n <<= 1;
    const std::size_t m = 2 * n;
    CBuffer c(m);
    for (std::size_t j = 0; j < m; ++j) {
      long lag = j <= n ? static_cast<long>(j) : static_cast<long>(m - j);
      c[j] = fgn_autocov(lag, h_);
    }
    fft1_forward(c);
    double mx = 0.0;
    for (auto& e : c) mx = std::max(mx, std::abs(e.real()));
    sqrt_eig_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      double e = c[j].real();
      if (e < -1e-10 * mx) {
        sqrt_eig_.clear();
        return false;
      }
      sqrt_eig_[j] = std::sqrt(std::max(e, 0.0) / static_cast<double>(m));
    }
    return true;
  }

  void build_cholesky() {
    if (len_ > kCholeskyLimit)
      throw NumericalError("fGn: circulant embedding not nonnegative and L=" + std::to_string(len_) +
                           " exceeds the Cholesky fallback limit " + std::to_string(kCholeskyLimit));
    chol_.assign(len_ * len_, 0.0);
    for (std::size_t i = 0; i < len_; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = fgn_autocov(static_cast<long>(i) - static_cast<long>(j), h_);
        for (std::size_t k = 0; k < j; ++k) s -= chol_[i * len_ + k] * chol_[j * len_ + k];
        if (i == j) {
          if (!(s > 0.0))
            throw NumericalError("fGn Cholesky: pivot " + std::to_string(i) + " = " + std::to_string(s) +
                                 " (covariance not positive definite at H=" + std::to_string(h_) + ")");
          chol_[i * len_ + i] = std::sqrt(s);
        } else {
          chol_[i * len_ + j] = s / chol_[j * len_ + j];
        }
      }
  }

  double h_;
  std::size_t len_;
  std::vector<double> sqrt_eig_;
  std::vector<double> chol_;
};

inline FbmPath fbm_from_increments(const std::vector<double>& inc, double h, double t0, double dt) {
  FbmPath p{t0, dt, std::vector<double>(inc.size() + 1, 0.0)};
  const double scale = std::pow(dt, h);
  double acc = 0.0;
  for (std::size_t i = 0; i < inc.size(); ++i) {
    acc += scale * inc[i];
    p.values[i + 1] = acc;
  }
  return p;
}

// One fBm path on {0, dt, ..., L dt}.
inline FbmPath sample_fbm(double h, std::size_t len, double dt, std::uint64_t seed) {
  require(dt > 0.0, "sample_fbm: dt must be positive");
  FgnSampler s(h, len);
  CounterRng rng(stream_key(seed));
  std::vector<double> a, b;
  s.sample_pair(rng, a, b);
  return fbm_from_increments(a, h, 0.0, dt);
}

struct ModeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;

  bool operator==(const ModeGrid&) const = default;
};

// Independent complex fBm beta_k = b_k^re + i b_k^im for each k in the upper
// half-lattice with |k|_inf <= cutoff. Paths are generated on demand from
// streams keyed by (seed, k), so a mode's path does not depend on the cutoff
// and the family for N is a prefix of the family for any N' > N.
class FbmFamily {
 public:
  using Layout = std::function<ModeGrid(Wave)>;

  FbmFamily(double h, int cutoff, std::uint64_t seed, Layout layout)
      : h_(h), n_(cutoff), seed_(seed), layout_(std::move(layout)), cache_(std::make_shared<Cache>()) {
    check_hurst(h);
    require(cutoff >= 1, "fbm family: cutoff must be >= 1");
  }

  // Same grid {0, dt, ..., L dt} for every mode.
  static FbmFamily uniform(double h, int cutoff, std::size_t len, double dt, std::uint64_t seed) {
    require(dt > 0.0 && len >= 1, "fbm family: need dt > 0 and L >= 1");
    return FbmFamily(h, cutoff, seed, [=](Wave) { return ModeGrid{0.0, dt, len}; });
  }

  double hurst() const { return h_; }
  int cutoff() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  ModeGrid grid(Wave k) const { return layout_(k); }

  // (real part, imaginary part), both on grid(k).
  std::pair<FbmPath, FbmPath> paths(Wave k) const {
    require(k.is_upper() && k.in_square(n_), "fbm family: mode outside the upper half of the cutoff square");
    ModeGrid g = layout_(k);
    std::shared_ptr<const FgnSampler> s = sampler(g.steps);
    CounterRng rng(stream_key(seed_, k.k1, k.k2));
    std::vector<double> a, b;
    s->sample_pair(rng, a, b);
    return {fbm_from_increments(a, h_, g.t0, g.dt), fbm_from_increments(b, h_, g.t0, g.dt)};
  }

 private:
  struct Cache {
    std::mutex mu;
    std::size_t len = 0;
    std::shared_ptr<const FgnSampler> sampler;
  };

  std::shared_ptr<const FgnSampler> sampler(std::size_t len) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (!cache_->sampler || cache_->len != len) {
      cache_->sampler = std::make_shared<const FgnSampler>(h_, len);
      cache_->len = len;
    }
    return cache_->sampler;
  }

  double h_;
  int n_;
  std::uint64_t seed_;
  Layout layout_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace fns2d
