#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "weilcat/sqrtq.hpp"
#include "weilcat/sturm.hpp"
#include "weilcat/weil.hpp"

namespace weilcat {

// Owning MPFR value with a fixed precision; every result takes the precision of its left operand.
class Real {
 public:
  explicit Real(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Real(const Int& n, mpfr_prec_t bits) : Real(bits) { mpfr_set_z(v_, n.get_mpz_t(), MPFR_RNDN); }
  // n / 2^k
  static Real dyadic(const Int& n, unsigned long k, mpfr_prec_t bits) {
    Real r(n, bits);
    mpfr_div_2ui(r.v_, r.v_, k, MPFR_RNDN);
    return r;
  }
  static Real pi(mpfr_prec_t bits) {
    Real r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Real pow10(long e, mpfr_prec_t bits) {
    Real r(bits);
    mpfr_ui_pow_ui(r.v_, 10, static_cast<unsigned long>(std::labs(e)), MPFR_RNDN);
    if (e < 0) mpfr_ui_div(r.v_, 1, r.v_, MPFR_RNDN);
    return r;
  }

  Real(const Real& o) : Real(mpfr_get_prec(o.v_)) { mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept : Real(mpfr_get_prec(o.v_)) { mpfr_swap(v_, o.v_); }
  Real& operator=(Real o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // Nearest integer.
  Int round() const {
    Int n;
    mpfr_get_z(n.get_mpz_t(), v_, MPFR_RNDN);
    return n;
  }

  friend Real operator+(Real a, const Real& b) { mpfr_add(a.v_, a.v_, b.v_, MPFR_RNDN); return a; }
  friend Real operator-(Real a, const Real& b) { mpfr_sub(a.v_, a.v_, b.v_, MPFR_RNDN); return a; }
  friend Real operator*(Real a, const Real& b) { mpfr_mul(a.v_, a.v_, b.v_, MPFR_RNDN); return a; }
  friend Real operator/(Real a, const Real& b) { mpfr_div(a.v_, a.v_, b.v_, MPFR_RNDN); return a; }
  friend Real operator*(Real a, const Int& b) { mpfr_mul_z(a.v_, a.v_, b.get_mpz_t(), MPFR_RNDN); return a; }
  friend Real sqrt(Real a) { mpfr_sqrt(a.v_, a.v_, MPFR_RNDN); return a; }
  friend Real abs(Real a) { mpfr_abs(a.v_, a.v_, MPFR_RNDN); return a; }
  friend Real atan2(const Real& y, const Real& x) {
    Real r(y.precision());
    mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN);
    return r;
  }
  friend int cmp(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_); }
  friend bool operator<(const Real& a, const Real& b) { return cmp(a, b) < 0; }

 private:
  mpfr_t v_;
};

struct ComplexRoot {
  Real re, im, radius;
};

struct AngleData {
  std::vector<double> normalized_args;  // one t in [0, 1/2] per conjugate pair
  long precision_bits = 0;
  int relations_found = 0;
  int delta = 0;
  bool certified_stable = false;
  bool numerical = true;
};

namespace detail {

// Sign of f(num / 2^k), exact.
inline int sign_at_dyadic(const IntPoly& f, const Int& num, unsigned long k) {
  const int d = f.degree();
  Int acc = 0;  // Horner on the homogenized form sum c_i num^i 2^{k(d-i)}
  for (int i = d; i >= 0; --i) acc = acc * num + Int(f[i] << (k * static_cast<unsigned long>(d - i)));
  return sgn(acc);
}

inline int variations_at_dyadic(const std::vector<IntPoly>& seq, const Int& num, unsigned long k) {
  int prev = 0, v = 0;
  for (const auto& f : seq) {
    const int s = sign_at_dyadic(f, num, k);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

// Root of a squarefree polynomial inside (lo, hi] / 2^k; exact once lo == hi.
struct DyadicInterval {
  Int lo, hi;
  unsigned long k = 0;
  bool exact() const { return lo == hi; }
};

inline std::vector<DyadicInterval> isolate_real_roots(const IntPoly& f, const Int& bound) {
  std::vector<DyadicInterval> out;
  if (f.degree() <= 0) return out;
  const auto seq = sturm_sequence(f);
  auto count = [&](const DyadicInterval& I) {
    return variations_at_dyadic(seq, I.lo, I.k) - variations_at_dyadic(seq, I.hi, I.k);
  };
  std::vector<DyadicInterval> todo{{Int(-bound), bound, 0}};
  while (!todo.empty()) {
    DyadicInterval I = todo.back();
    todo.pop_back();
    const int c = count(I);
    if (c == 0) continue;
    if (c == 1) {
      out.push_back(I);
      continue;
    }
    const Int mid = I.lo + I.hi;
    todo.push_back({2 * I.lo, mid, I.k + 1});
    todo.push_back({mid, 2 * I.hi, I.k + 1});
  }
  std::sort(out.begin(), out.end(),
            [](const DyadicInterval& a, const DyadicInterval& b) { return Int(a.lo << b.k) < Int(b.lo << a.k); });
  return out;
}

// Bisect until the width is at most 2^-bits.
inline void refine(const IntPoly& f, DyadicInterval& I, unsigned long bits) {
  if (sign_at_dyadic(f, I.hi, I.k) == 0) {
    I.lo = I.hi;
    return;
  }
  const int s_hi = sign_at_dyadic(f, I.hi, I.k);
  while (true) {
    if (Int((I.hi - I.lo) << bits) <= Int(Int(1) << I.k)) return;
    I.lo *= 2;
    I.hi *= 2;
    ++I.k;
    const Int mid = I.lo + (I.hi - I.lo) / 2;
    const int s = sign_at_dyadic(f, mid, I.k);
    if (s == 0) {
      I.lo = I.hi = mid;
      return;
    }
    if (s == s_hi) I.hi = mid;
    else I.lo = mid;
  }
}

// Real roots beta of Q, with multiplicity, as one value per conjugate pair of Frobenius roots.
// Roots at +-2 sqrt q are reported exactly through `edge`: +1 or -1, 0 for interior roots.
struct RealRoot {
  DyadicInterval where;
  int edge = 0;
};

inline std::vector<RealRoot> frobenius_traces(const WeilPoly& P, unsigned long bits) {
  const Int& q = P.q();
  const IntPoly Q = real_weil(P).poly();
  const SqrtQInt top(0, 2, q), bottom(0, -2, q);
  const Int bound = isqrt(Int(4 * q)) + 1;
  std::vector<RealRoot> out;
  for (auto [f, mult] : squarefree_decomposition(Q)) {
    if (sign_at(f, top) == 0) {
      for (unsigned i = 0; i < mult; ++i) out.push_back({{}, 1});
      f = divide_exact(f, is_square(q) ? IntPoly(std::vector<Int>{Int(-2 * isqrt(q)), 1})
                                       : IntPoly(std::vector<Int>{Int(-4 * q), 0, 1}));
      if (!is_square(q)) {
        for (unsigned i = 0; i < mult; ++i) out.push_back({{}, -1});
      }
    }
    if (f.degree() > 0 && sign_at(f, bottom) == 0) {
      for (unsigned i = 0; i < mult; ++i) out.push_back({{}, -1});
      f = divide_exact(f, IntPoly(std::vector<Int>{Int(2 * isqrt(q)), 1}));
    }
    for (auto I : isolate_real_roots(f, bound)) {
      refine(f, I, bits);
      for (unsigned i = 0; i < mult; ++i) out.push_back({I, 0});
    }
  }
  if (out.size() != static_cast<std::size_t>(P.g())) throw ConsistencyError("Q does not have g real roots in the Weil interval");
  return out;
}

// t = arg(alpha)/2pi in [0, 1/2] for alpha = (beta + i sqrt(4q - beta^2)) / 2.
inline Real normalized_arg(const RealRoot& r, const Int& q, mpfr_prec_t bits) {
  if (r.edge == 1) return Real(bits);
  if (r.edge == -1) return Real::dyadic(Int(1), 1, bits);
  const Real beta = Real::dyadic(r.where.lo + (r.where.hi - r.where.lo) / 2, r.where.k, bits);
  const Real s = sqrt(Real(Int(4 * q), bits) - beta * beta);
  return atan2(s, beta) / (Real::pi(bits) * Int(2));
}

}  // namespace detail

// LLL reduction of linearly independent integer rows with Lovasz constant 99/100. Fraction-free: the
// Gram-Schmidt data is kept as the integers d_i (Gram determinants) and lambda_kj = d_j mu_kj.
inline void lll_reduce(std::vector<std::vector<Int>>& b) {
  const std::size_t n = b.size();
  if (n < 2) return;
  auto dot = [](const std::vector<Int>& x, const std::vector<Int>& y) {
    Int s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  // 1-based in the Gram data: d[0] = 1, d[i] for row i - 1; lam[k][j] for rows k - 1, j - 1.
  std::vector<Int> d(n + 1, Int(0));
  std::vector<std::vector<Int>> lam(n + 1, std::vector<Int>(n + 1, Int(0)));
  d[0] = 1;
  auto gram = [&](std::size_t k) {
    for (std::size_t j = 1; j <= k; ++j) {
      Int u = dot(b[k - 1], b[j - 1]);
      for (std::size_t i = 1; i < j; ++i) u = (d[i] * u - lam[k][i] * lam[j][i]) / d[i - 1];
      if (j < k) lam[k][j] = u;
      else d[k] = u;
    }
    if (d[k] == 0) throw std::invalid_argument("lll_reduce needs independent rows");
  };
  auto reduce = [&](std::size_t k, std::size_t l) {
    if (Int(2 * abs(lam[k][l])) <= d[l]) return;
    Int r;  // nearest integer to lam / d
    const Int num = 2 * lam[k][l] + d[l], den = 2 * d[l];
    mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (std::size_t c = 0; c < b[k - 1].size(); ++c) b[k - 1][c] -= r * b[l - 1][c];
    lam[k][l] -= r * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[k][i] -= r * lam[l][i];
  };
  std::size_t k = 2, kmax = 1;
  gram(1);
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      gram(k);
    }
    reduce(k, k - 1);
    if (100 * d[k] * d[k - 2] < 99 * d[k - 1] * d[k - 1] - 100 * lam[k][k - 1] * lam[k][k - 1]) {
      std::swap(b[k - 1], b[k - 2]);
      for (std::size_t j = 1; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
      const Int l = lam[k][k - 1];
      const Int B = (d[k - 2] * d[k] + l * l) / d[k - 1];
      for (std::size_t i = k + 1; i <= kmax; ++i) {
        const Int t = lam[i][k];
        lam[i][k] = (d[k] * lam[i][k - 1] - l * t) / d[k - 1];
        lam[i][k - 1] = (B * t + l * lam[i][k]) / d[k];
      }
      d[k - 1] = B;
      if (k > 2) --k;
      continue;
    }
    for (std::size_t l = k - 1; l-- > 1;) reduce(k, l);
    ++k;
  }
}

// Number of independent integer relations among xs, read off the short vectors of the reduced lindep
// lattice. With D working digits the column is scaled by 10^(D - guard). A genuine relation c leaves a
// residual of about |c| 10^-D, a spurious short vector about |c| 10^-(D - guard); the cut sits between.
inline int integer_relations(const std::vector<Real>& xs, mpfr_prec_t bits, int guard = 10) {
  const std::size_t n = xs.size();
  const long digits = static_cast<long>(std::floor(static_cast<double>(bits) * std::log10(2.0)));
  if (digits <= 2 * guard) throw std::invalid_argument("precision too low for relation search");
  const Real scale = Real::pow10(digits - guard, bits);
  std::vector<std::vector<Int>> rows(n, std::vector<Int>(n + 1, Int(0)));
  for (std::size_t i = 0; i < n; ++i) {
    rows[i][i] = 1;
    rows[i][n] = (xs[i] * scale).round();
  }
  lll_reduce(rows);
  const Real cut = Real::pow10(-(digits - guard / 2), bits);
  int found = 0;
  for (const auto& r : rows) {
    Real residual(bits);
    Int l1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      residual = residual + xs[i] * r[i];
      l1 += abs(r[i]);
    }
    if (abs(residual) < cut * l1) ++found;
  }
  return found;
}

// Frobenius roots as complex approximations, conjugate pairs adjacent. The real parts come from exact
// isolation of the roots of Q, so the radius bound follows from the isolating interval width.
inline std::vector<ComplexRoot> complex_roots(const WeilPoly& P, long bits) {
  if (bits < 53) throw std::invalid_argument("complex_roots needs at least 53 bits");
  const Int& q = P.q();
  const auto prec = static_cast<mpfr_prec_t>(bits + 32);
  std::vector<ComplexRoot> out;
  for (const auto& r : detail::frobenius_traces(P, static_cast<unsigned long>(bits) + 8)) {
    if (r.edge != 0) {
      Real re = sqrt(Real(q, prec));
      if (r.edge < 0) re = Real(prec) - re;
      out.push_back({re, Real(prec), Real(prec)});
      out.push_back({re, Real(prec), Real(prec)});
      continue;
    }
    const auto& I = r.where;
    const Real lo = Real::dyadic(I.lo, I.k, prec), hi = Real::dyadic(I.hi, I.k, prec);
    const Real beta = Real::dyadic(I.lo + (I.hi - I.lo) / 2, I.k, prec);
    const Real four_q(Int(4 * q), prec);
    const Real im = sqrt(four_q - beta * beta) / Real(Int(2), prec);
    // |d alpha / d beta| = sqrt q / sqrt(4q - beta^2); take the smallest sqrt over the interval, then double
    const Real edge2 = cmp(abs(lo), abs(hi)) > 0 ? lo * lo : hi * hi;
    const Real width = hi - lo + Real::dyadic(Int(1), static_cast<unsigned long>(bits) + 8, prec);
    const Real radius = width * sqrt(Real(q, prec)) / sqrt(four_q - edge2) * Int(2);
    const Real re = beta / Real(Int(2), prec);
    out.push_back({re, im, radius});
    out.push_back({re, Real(prec) - im, radius});
  }
  return out;
}

namespace detail {

inline std::pair<int, std::vector<double>> angle_rank_at(const WeilPoly& P, long bits) {
  const auto prec = static_cast<mpfr_prec_t>(bits);
  std::vector<Real> xs;
  std::vector<double> ts;
  for (const auto& r : frobenius_traces(P, static_cast<unsigned long>(bits) + 16)) {
    xs.push_back(normalized_arg(r, P.q(), prec));
    ts.push_back(xs.back().to_double());
  }
  xs.emplace_back(Int(1), prec);
  return {integer_relations(xs, prec), ts};
}

}  // namespace detail

// Numerical angle rank: stable when two consecutive precisions agree; up to four doublings.
inline AngleData angle_rank(const WeilPoly& P, long bits = 128) {
  AngleData out;
  auto [rel, ts] = detail::angle_rank_at(P, bits);
  for (int attempt = 0; attempt <= 4; ++attempt) {
    auto [rel2, ts2] = detail::angle_rank_at(P, 2 * bits);
    out.normalized_args = std::move(ts2);
    out.precision_bits = 2 * bits;
    out.relations_found = rel2;
    out.certified_stable = rel == rel2;
    if (out.certified_stable) break;
    rel = rel2;
    bits *= 2;
  }
  out.delta = P.g() - out.relations_found;
  if (out.delta < 0) throw ConsistencyError("more relations than angles");
  return out;
}

}  // namespace weilcat
