#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gibbs.hpp"

// Fourth moment E||B(z,z)||^4_{H^rho} for a circular Gaussian z with E|z_a|^2 = s_a.
//
// Expanding |B_k|^2 |B_j|^2 gives eight factors. Writing conj(z_a) = -z_{-a},
// factor i is z at index c_i with
//   c1 = h, c2 = k-h, c3 = -h', c4 = h'-k, c5 = l, c6 = j-l, c7 = -l', c8 = l'-j
// over the unknowns (k, j, h, h', l, l'). E[z_a z_b] = -s_a when a + b = 0, so each
// pairing contributes prod s over its pairs (the eight signs cancel) on the
// lattice set cut out by its four constraints c_p + c_q = 0.
namespace fns2d {

namespace wick {

constexpr int kVars = 6;  // k, j, h, h', l, l'
using Row = std::array<int, kVars>;

inline constexpr std::array<Row, 8> kSlots = {{
    {0, 0, 1, 0, 0, 0},
    {1, 0, -1, 0, 0, 0},
    {0, 0, 0, -1, 0, 0},
    {-1, 0, 0, 1, 0, 0},
    {0, 0, 0, 0, 1, 0},
    {0, 1, 0, 0, -1, 0},
    {0, 0, 0, 0, 0, -1},
    {0, -1, 0, 0, 0, 1},
}};

using Pairs = std::array<std::pair<int, int>, 4>;  // 1-based slots, p < q, sorted

inline std::string key(const Pairs& p) {
  std::string s;
  for (auto [a, b] : p) {
    if (!s.empty()) s += '-';
    s += std::to_string(a) + std::to_string(b);
  }
  return s;
}

// Partner of slot 1 decides the case: 3, 4, 5, 6, 7, 8 map to cases 1..6,
// i.e. h = h', h = k-h', h = -l, h = l-j, h = l', h = j-l'.
inline int case_of(const Pairs& p) { return p[0].second - 2; }

// Pairings joining two slots of the same B factor force k = 0 or j = 0.
inline bool vanishes(const Pairs& p) {
  for (auto [a, b] : p)
    if ((a == 1 && b == 2) || (a == 3 && b == 4) || (a == 5 && b == 6) || (a == 7 && b == 8)) return true;
  return false;
}

inline std::vector<Pairs> all_pairings() {
  std::vector<Pairs> out;
  std::array<std::pair<int, int>, 4> cur{};
  std::array<bool, 9> used{};
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == 4) {
      out.push_back(cur);
      return;
    }
    int a = 1;
    while (used[a]) ++a;
    used[a] = true;
    for (int b = a + 1; b <= 8; ++b) {
      if (used[b]) continue;
      used[b] = true;
      cur[depth] = {a, b};
      self(self, depth + 1);
      used[b] = false;
    }
    used[a] = false;
  };
  rec(rec, 0);
  return out;
}

struct Vars {
  Wave k, j, h, hp, l, lp;
};

inline std::array<Wave, 8> slot_values(const Vars& v) {
  return {v.h, v.k - v.h, -v.hp, v.hp - v.k, v.l, v.j - v.l, -v.lp, v.lp - v.j};
}

// Tables for the inner loops: |k|^{2 rho} and gamma over the square.
class Kernel {
 public:
  Kernel(const Spectrum& s, double rho) : s_(s), n_(s.cutoff()), w_(2 * n_ + 1) {
    const std::size_t m = static_cast<std::size_t>(w_) * w_;
    pow_.assign(m, 0.0);
    gamma_.assign(m * m, 0.0);
    for (int a = -n_; a <= n_; ++a)
      for (int b = -n_; b <= n_; ++b) {
        Wave k{a, b};
        if (k.is_zero()) continue;
        pow_[idx(k)] = std::pow(static_cast<double>(k.norm2()), rho);
        for (int c = -n_; c <= n_; ++c)
          for (int d = -n_; d <= n_; ++d) {
            Wave h{c, d};
            if (h.is_zero() || h == k) continue;
            gamma_[idx(h) * m + idx(k)] = gamma_coeff(h, k);
          }
      }
  }
  const Spectrum& spectrum() const { return s_; }
  int cutoff() const { return n_; }
  double weight(Wave k) const { return pow_[idx(k)]; }
  double gamma(Wave h, Wave k) const { return gamma_[idx(h) * pow_.size() + idx(k)]; }

 private:
  std::size_t idx(Wave k) const { return static_cast<std::size_t>(k.k1 + n_) * w_ + (k.k2 + n_); }
  const Spectrum& s_;
  int n_, w_;
  std::vector<double> pow_, gamma_;
};

// Weight of one lattice point of one pairing, or 0 when any index leaves the square.
inline double term(const Kernel& K, const Pairs& pairs, const Vars& v) {
  const int n = K.cutoff();
  if (!v.k.in_square(n) || !v.j.in_square(n)) return 0.0;
  auto c = slot_values(v);
  for (Wave w : c)
    if (!w.in_square(n)) return 0.0;
  double prod = 1.0;
  for (auto [a, b] : pairs) prod *= K.spectrum()(c[a - 1]);
  if (prod == 0.0) return 0.0;
  return K.weight(v.k) * K.weight(v.j) * K.gamma(v.h, v.k) * K.gamma(v.hp, v.k) * K.gamma(v.l, v.j) *
         K.gamma(v.lp, v.j) * prod;
}

struct FourthMoment {
  std::map<std::string, double> terms;  // by pairing key
  std::array<double, 6> cases{};
  double total = 0.0;
  // Pairings internal to each B factor; they sum to (E||B||^2)^2.
  double block_diagonal = 0.0;
};

inline bool block_internal(const Pairs& p) {
  for (auto [a, b] : p)
    if ((a <= 4) != (b <= 4)) return false;
  return true;
}

inline void add_term(FourthMoment& m, const Pairs& p, double v) {
  m.terms[key(p)] += v;
  m.cases[static_cast<std::size_t>(case_of(p) - 1)] += v;
  m.total += v;
  if (block_internal(p)) m.block_diagonal += v;
}

inline std::vector<Wave> square_modes(int n) {
  std::vector<Wave> w;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      if (a != 0 || b != 0) w.push_back({a, b});
  return w;
}

namespace detail {

struct Frac {
  long long p = 0, q = 1;
  Frac() = default;
  Frac(long long a, long long b = 1) : p(a), q(b) { norm(); }
  void norm() {
    if (q < 0) p = -p, q = -q;
    long long g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) p /= g, q /= g;
  }
  friend Frac operator-(Frac a, Frac b) { return Frac(a.p * b.q - b.p * a.q, a.q * b.q); }
  friend Frac operator*(Frac a, Frac b) { return Frac(a.p * b.p, a.q * b.q); }
  friend Frac operator/(Frac a, Frac b) { return Frac(a.p * b.q, a.q * b.p); }
  bool zero() const { return p == 0; }
};

// Reduced row echelon form of the pair constraints. Returns, for each variable,
// either "free" or its expression -sum_f coef_f x_f in the free variables.
struct Elimination {
  std::vector<int> free_vars;
  // expr[v][f] : coefficient of free_vars[f] in variable v (identity for free v)
  std::array<std::vector<Frac>, kVars> expr;
};

inline Elimination eliminate(const Pairs& pairs) {
  std::vector<std::array<Frac, kVars>> m;
  for (auto [a, b] : pairs) {
    std::array<Frac, kVars> r;
    for (int v = 0; v < kVars; ++v) r[v] = Frac(kSlots[a - 1][v] + kSlots[b - 1][v]);
    m.push_back(r);
  }
  std::array<int, kVars> pivot_row;
  pivot_row.fill(-1);
  std::size_t row = 0;
  for (int col = 0; col < kVars && row < m.size(); ++col) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][col].zero()) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    Frac d = m[row][col];
    for (auto& x : m[row]) x = x / d;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col].zero()) continue;
      Frac f = m[r][col];
      for (int c = 0; c < kVars; ++c) m[r][c] = m[r][c] - f * m[row][c];
    }
    pivot_row[col] = static_cast<int>(row++);
  }
  Elimination e;
  for (int v = 0; v < kVars; ++v)
    if (pivot_row[v] < 0) e.free_vars.push_back(v);
  for (int v = 0; v < kVars; ++v) {
    e.expr[v].assign(e.free_vars.size(), Frac(0));
    for (std::size_t f = 0; f < e.free_vars.size(); ++f) {
      if (pivot_row[v] < 0)
        e.expr[v][f] = Frac(e.free_vars[f] == v ? 1 : 0);
      else
        e.expr[v][f] = Frac(0) - m[static_cast<std::size_t>(pivot_row[v])][e.free_vars[f]];
    }
  }
  return e;
}

}  // namespace detail

// Independent route: solve each pairing's constraints symbolically at run time
// and sum over its free lattice variables.
inline FourthMoment fourth_moment_generic(const Spectrum& s, double rho) {
  const std::vector<Wave> modes = square_modes(s.cutoff());
  const Kernel K(s, rho);
  FourthMoment out;
  for (const Pairs& p : all_pairings()) {
    if (vanishes(p)) continue;
    detail::Elimination e = detail::eliminate(p);
    const std::size_t nf = e.free_vars.size();
    // Integer form: variable v = (sum_f num[v][f] x_f) / den[v].
    std::array<long long, kVars> den{};
    std::array<std::vector<long long>, kVars> num;
    for (int v = 0; v < kVars; ++v) {
      den[v] = 1;
      for (std::size_t f = 0; f < nf; ++f) den[v] = std::lcm(den[v], e.expr[v][f].q);
      for (std::size_t f = 0; f < nf; ++f) num[v].push_back(e.expr[v][f].p * (den[v] / e.expr[v][f].q));
    }
    std::vector<std::size_t> idx(nf, 0);
    double acc = 0.0;
    while (true) {
      std::array<Wave, kVars> val{};
      bool ok = true;
      for (int v = 0; v < kVars && ok; ++v) {
        long long n1 = 0, n2 = 0;
        for (std::size_t f = 0; f < nf; ++f) {
          n1 += num[v][f] * modes[idx[f]].k1;
          n2 += num[v][f] * modes[idx[f]].k2;
        }
        if (n1 % den[v] != 0 || n2 % den[v] != 0) ok = false;
        val[v] = Wave{static_cast<int>(n1 / den[v]), static_cast<int>(n2 / den[v])};
      }
      if (ok) acc += term(K, p, {val[0], val[1], val[2], val[3], val[4], val[5]});
      std::size_t f = 0;
      while (f < nf && ++idx[f] == modes.size()) idx[f++] = 0;
      if (f == nf) break;
    }
    add_term(out, p, acc);
  }
  return out;
}

// Hand case list. Each row fixes the pairing and expresses all six unknowns in
// terms of (k, h, x), where x is j or h' depending on the row's kind.
enum class Free { khj, kh_hp_jneg, kh_hp_jpos, factor };

struct CaseRow {
  Pairs pairs;
  Free kind;
  Vars (*subst)(Wave k, Wave h, Wave x);
};

inline const std::vector<CaseRow>& case_rows() {
  using F = Free;
  static const std::vector<CaseRow> rows = {
      // case 1: h = h'
      {{{{1, 3}, {2, 4}, {5, 7}, {6, 8}}}, F::factor, nullptr},
      {{{{1, 3}, {2, 4}, {5, 8}, {6, 7}}}, F::factor, nullptr},
      {{{{1, 3}, {2, 5}, {4, 7}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, h - k, h - k}; }},
      {{{{1, 3}, {2, 5}, {4, 8}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, h - k, j + k - h}; }},
      {{{{1, 3}, {2, 6}, {4, 7}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, k + j - h, h - k}; }},
      {{{{1, 3}, {2, 6}, {4, 8}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, k + j - h, k + j - h}; }},
      {{{{1, 3}, {2, 7}, {4, 5}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, k - h, k - h}; }},
      {{{{1, 3}, {2, 7}, {4, 6}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, j + h - k, k - h}; }},
      {{{{1, 3}, {2, 8}, {4, 5}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, k - h, j + h - k}; }},
      {{{{1, 3}, {2, 8}, {4, 6}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, j + h - k, j + h - k}; }},
      // case 2: h = k - h'
      {{{{1, 4}, {2, 3}, {5, 7}, {6, 8}}}, F::factor, nullptr},
      {{{{1, 4}, {2, 3}, {5, 8}, {6, 7}}}, F::factor, nullptr},
      {{{{1, 4}, {2, 5}, {3, 7}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, h - k, h - k}; }},
      {{{{1, 4}, {2, 5}, {3, 8}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, h - k, j + k - h}; }},
      {{{{1, 4}, {2, 6}, {3, 7}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, k + j - h, h - k}; }},
      {{{{1, 4}, {2, 6}, {3, 8}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, k + j - h, k + j - h}; }},
      {{{{1, 4}, {2, 7}, {3, 5}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, k - h, k - h}; }},
      {{{{1, 4}, {2, 7}, {3, 6}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, j + h - k, k - h}; }},
      {{{{1, 4}, {2, 8}, {3, 5}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, k - h, j + h - k}; }},
      {{{{1, 4}, {2, 8}, {3, 6}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, j + h - k, j + h - k}; }},
      // case 3: h = -l
      {{{{1, 5}, {2, 3}, {4, 7}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, -h, -h}; }},
      {{{{1, 5}, {2, 3}, {4, 8}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, -h, j + h}; }},
      {{{{1, 5}, {2, 4}, {3, 7}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, -h, -h}; }},
      {{{{1, 5}, {2, 4}, {3, 8}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, -h, j + h}; }},
      {{{{1, 5}, {2, 6}, {3, 7}, {4, 8}}}, F::kh_hp_jneg, [](Wave k, Wave h, Wave hp) { return Vars{k, -k, h, hp, -h, -hp}; }},
      {{{{1, 5}, {2, 6}, {3, 8}, {4, 7}}}, F::kh_hp_jneg, [](Wave k, Wave h, Wave hp) { return Vars{k, -k, h, hp, -h, hp - k}; }},
      {{{{1, 5}, {2, 7}, {3, 6}, {4, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, j + h, -h, k - h}; }},
      {{{{1, 5}, {2, 7}, {3, 8}, {4, 6}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h - j, -h, k - h}; }},
      {{{{1, 5}, {2, 8}, {3, 6}, {4, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, j + h, -h, j + h - k}; }},
      {{{{1, 5}, {2, 8}, {3, 7}, {4, 6}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h - j, -h, j + h - k}; }},
      // case 4: h = l - j
      {{{{1, 6}, {2, 3}, {4, 7}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, h + j, -h}; }},
      {{{{1, 6}, {2, 3}, {4, 8}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, h + j, j + h}; }},
      {{{{1, 6}, {2, 4}, {3, 7}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, h + j, -h}; }},
      {{{{1, 6}, {2, 4}, {3, 8}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, h + j, j + h}; }},
      {{{{1, 6}, {2, 5}, {3, 7}, {4, 8}}}, F::kh_hp_jneg, [](Wave k, Wave h, Wave hp) { return Vars{k, -k, h, hp, h - k, -hp}; }},
      {{{{1, 6}, {2, 5}, {3, 8}, {4, 7}}}, F::kh_hp_jneg, [](Wave k, Wave h, Wave hp) { return Vars{k, -k, h, hp, h - k, hp - k}; }},
      {{{{1, 6}, {2, 7}, {3, 5}, {4, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h + j, h + j, k - h}; }},
      {{{{1, 6}, {2, 7}, {3, 8}, {4, 5}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h - j, h + j, k - h}; }},
      {{{{1, 6}, {2, 8}, {3, 5}, {4, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h + j, h + j, j + h - k}; }},
      {{{{1, 6}, {2, 8}, {3, 7}, {4, 5}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h - j, h + j, j + h - k}; }},
      // case 5: h = l'
      {{{{1, 7}, {2, 3}, {4, 5}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, h, h}; }},
      {{{{1, 7}, {2, 3}, {4, 6}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, j - h, h}; }},
      {{{{1, 7}, {2, 4}, {3, 5}, {6, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, h, h}; }},
      {{{{1, 7}, {2, 4}, {3, 6}, {5, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, j - h, h}; }},
      {{{{1, 7}, {2, 5}, {3, 6}, {4, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, j - h + k, h - k, h}; }},
      {{{{1, 7}, {2, 5}, {3, 8}, {4, 6}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h - j, h - k, h}; }},
      {{{{1, 7}, {2, 6}, {3, 5}, {4, 8}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k + j - h, k + j - h, h}; }},
      {{{{1, 7}, {2, 6}, {3, 8}, {4, 5}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h - j, k + j - h, h}; }},
      {{{{1, 7}, {2, 8}, {3, 5}, {4, 6}}}, F::kh_hp_jpos, [](Wave k, Wave h, Wave hp) { return Vars{k, k, h, hp, hp, h}; }},
      {{{{1, 7}, {2, 8}, {3, 6}, {4, 5}}}, F::kh_hp_jpos, [](Wave k, Wave h, Wave hp) { return Vars{k, k, h, hp, k - hp, h}; }},
      // case 6: h = j - l'
      {{{{1, 8}, {2, 3}, {4, 5}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, h, j - h}; }},
      {{{{1, 8}, {2, 3}, {4, 6}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k - h, j - h, j - h}; }},
      {{{{1, 8}, {2, 4}, {3, 5}, {6, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, h, j - h}; }},
      {{{{1, 8}, {2, 4}, {3, 6}, {5, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h, j - h, j - h}; }},
      {{{{1, 8}, {2, 5}, {3, 6}, {4, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, j - h + k, h - k, j - h}; }},
      {{{{1, 8}, {2, 5}, {3, 7}, {4, 6}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h - j, h - k, j - h}; }},
      {{{{1, 8}, {2, 6}, {3, 5}, {4, 7}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, k + j - h, k + j - h, j - h}; }},
      {{{{1, 8}, {2, 6}, {3, 7}, {4, 5}}}, F::khj, [](Wave k, Wave h, Wave j) { return Vars{k, j, h, h - j, k + j - h, j - h}; }},
      {{{{1, 8}, {2, 7}, {3, 5}, {4, 6}}}, F::kh_hp_jpos, [](Wave k, Wave h, Wave hp) { return Vars{k, k, h, hp, hp, k - h}; }},
      {{{{1, 8}, {2, 7}, {3, 6}, {4, 5}}}, F::kh_hp_jpos, [](Wave k, Wave h, Wave hp) { return Vars{k, k, h, hp, k - hp, k - h}; }},
  };
  return rows;
}

// Single-factor sums for the four pairings that split into two independent
// second-moment blocks: sum_{k,h} |k|^{2 rho} gamma_{h,k} gamma_{h',k} s_h s_{k-h}
// with h' = h (same) or h' = k - h (swapped).
inline double block_sum(const Spectrum& s, double rho, bool swapped) {
  const int n = s.cutoff();
  const std::vector<Wave> modes = square_modes(n);
  double acc = 0.0;
  for (Wave k : modes) {
    double wk = std::pow(static_cast<double>(k.norm2()), rho);
    for (Wave h : modes) {
      Wave r = k - h;
      if (!r.in_square(n)) continue;
      double w = s(h) * s(r);
      if (w == 0.0) continue;
      acc += wk * gamma_coeff(h, k) * gamma_coeff(swapped ? r : h, k) * w;
    }
  }
  return acc;
}

inline FourthMoment fourth_moment_cases(const Spectrum& s, double rho) {
  const std::vector<Wave> modes = square_modes(s.cutoff());
  const double same = block_sum(s, rho, false), swapped = block_sum(s, rho, true);
  const Kernel K(s, rho);
  FourthMoment out;
  for (const CaseRow& row : case_rows()) {
    double acc = 0.0;
    if (row.kind == Free::factor) {
      // (1,3|1,4)(2,4|2,3) picks the first block, (5,7)(6,8) or (5,8)(6,7) the second.
      bool first_swapped = row.pairs[0].second == 4;
      bool second_swapped = row.pairs[2].second == 8;
      acc = (first_swapped ? swapped : same) * (second_swapped ? swapped : same);
    } else {
      for (Wave k : modes)
        for (Wave h : modes) {
          if (!(k - h).in_square(s.cutoff())) continue;
          for (Wave x : modes) acc += term(K, row.pairs, row.subst(k, h, x));
        }
    }
    add_term(out, row.pairs, acc);
  }
  return out;
}

}  // namespace wick

struct FourthMomentReport {
  wick::FourthMoment generic, cases;
  double second_moment_series = 0.0;
  Estimate mc;
  std::size_t samples = 0;
};

inline FourthMomentReport bzz_fourth_moment(const Spectrum& s, double rho, std::size_t samples, std::uint64_t seed) {
  FourthMomentReport r;
  r.generic = wick::fourth_moment_generic(s, rho);
  r.cases = wick::fourth_moment_cases(s, rho);
  r.second_moment_series = bzz_second_moment_series(s, rho);
  r.samples = samples;
  if (samples >= 2) {
    std::vector<double> x = bzz_norm2_samples(s, rho, samples, seed);
    for (double& v : x) v *= v;
    r.mc = mean_se(x);
  }
  return r;
}

}  // namespace fns2d
