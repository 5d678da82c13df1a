#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace fns2d {

struct Wave {
  int k1 = 0;
  int k2 = 0;

  constexpr long long norm2() const {
    return static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm2())); }
  constexpr int max_norm() const { return std::max(std::abs(k1), std::abs(k2)); }
  constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }
  // Z^2_+ : the half-lattice on which coefficients are stored.
  constexpr bool is_upper() const { return k1 > 0 || (k1 == 0 && k2 > 0); }
  constexpr bool in_square(int n) const { return !is_zero() && max_norm() <= n; }

  constexpr Wave operator-() const { return {-k1, -k2}; }
  constexpr Wave operator+(Wave o) const { return {k1 + o.k1, k2 + o.k2}; }
  constexpr Wave operator-(Wave o) const { return {k1 - o.k1, k2 - o.k2}; }
  constexpr bool operator==(const Wave&) const = default;
  constexpr auto operator<=>(const Wave&) const = default;
};

// k^perp = (-k2, k1)
constexpr long long perp_dot(Wave h, Wave k) {
  return -static_cast<long long>(h.k2) * k.k1 + static_cast<long long>(h.k1) * k.k2;
}

constexpr long long dot(Wave a, Wave b) {
  return static_cast<long long>(a.k1) * b.k1 + static_cast<long long>(a.k2) * b.k2;
}

}  // namespace fns2d

template <>
struct std::hash<fns2d::Wave> {
  std::size_t operator()(const fns2d::Wave& w) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(w.k1) << 32) ^
                                  static_cast<unsigned>(w.k2));
  }
};
