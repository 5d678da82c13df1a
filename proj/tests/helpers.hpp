#pragma once

#include <cmath>
#include <cstdint>

#include "fns2d/field.hpp"
#include "fns2d/rng.hpp"

namespace fns2d::test {

// Random field with |v_k| ~ |k|^{-decay}, seeded.
inline FourierField random_field(int n, std::uint64_t seed, double decay = 1.0) {
  FourierField v(n);
  CounterRng rng(stream_key(seed, 77));
  v.for_each_upper_mut([&](Wave k, cplx& c) {
    double a = std::pow(k.norm(), -decay);
    double x = rng.normal(), y = rng.normal();
    c = a * cplx(x, y);
  });
  return v;
}

inline double max_abs_diff(const FourierField& a, const FourierField& b) {
  double m = 0.0;
  a.for_each_upper([&](Wave k, cplx c) { m = std::max(m, std::abs(c - b.at_upper(k))); });
  return m;
}

}  // namespace fns2d::test
