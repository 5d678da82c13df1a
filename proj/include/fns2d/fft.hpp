#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <tuple>
#include <algorithm>
#include <utility>
#include <vector>

namespace fns2d {

template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const { return true; }
};

using CBuffer = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

namespace detail {

// Plans are created once per (rank, size, direction) and executed with the
// new-array interface, which FFTW documents as thread-safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan get(int rank, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(rank, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = rank == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    CBuffer scratch(total);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = rank == 1 ? fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE)
                               : fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace detail

// Unnormalised in-place transforms. Backward uses e^{+i}, forward e^{-i}.
inline void fft2_backward(CBuffer& a, int m) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(detail::PlanCache::instance().get(2, m, FFTW_BACKWARD), p, p);
}
inline void fft2_forward(CBuffer& a, int m) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(detail::PlanCache::instance().get(2, m, FFTW_FORWARD), p, p);
}
inline void fft1_forward(CBuffer& a) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(detail::PlanCache::instance().get(1, static_cast<int>(a.size()), FFTW_FORWARD), p, p);
}

// Smallest 2^a 3^b 5^c >= n.
inline int smooth_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

inline int wrap(int k, int m) { return ((k % m) + m) % m; }

}  // namespace fns2d
