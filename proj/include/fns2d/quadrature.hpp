#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "errors.hpp"

namespace fns2d {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                              0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                              0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                              0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                              0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                              0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                              0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

template <class F>
Piece gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double k = fc * kWk[7], g = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    double x = h * kXk[i];
    double s = f(c - x) + f(c + x);
    k += kWk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod: bisect the interval with the largest error
// estimate until the summed estimate drops below abs_tol.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, int max_intervals = 2000) {
  std::priority_queue<detail::Piece> q;
  q.push(detail::gk15(f, a, b));
  double val = q.top().value, err = q.top().error;
  int count = 1;
  while (err > abs_tol && count < max_intervals) {
    detail::Piece p = q.top();
    q.pop();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      q.push(p);
      break;
    }
    detail::Piece l = detail::gk15(f, p.a, mid), r = detail::gk15(f, mid, p.b);
    val += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    q.push(l);
    q.push(r);
    ++count;
  }
  // Re-sum to shed the drift of the running update.
  double v = 0.0, e = 0.0;
  while (!q.empty()) {
    v += q.top().value;
    e += q.top().error;
    q.pop();
  }
  return {v, e, count};
}

}  // namespace fns2d
