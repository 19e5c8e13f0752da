#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "weilcat/exact_poly.hpp"

namespace weilcat {

// (g, q, p, a) with q = p^a. q = 1 is accepted only in oracle mode, where p = 1 and a = 0.
struct WeilContext {
  int g = 1;
  Int q = 2;
  Int p = 2;
  unsigned a = 1;

  bool oracle() const { return q == 1; }
  friend bool operator==(const WeilContext&, const WeilContext&) = default;
};

inline WeilContext make_context(int g, const Int& q, bool allow_oracle = false) {
  if (g < 1) throw std::invalid_argument("dimension must be at least 1");
  if (q == 1 && allow_oracle) return WeilContext{g, 1, 1, 0};
  auto pp = prime_power(q);
  if (!pp) throw std::invalid_argument("q = " + q.get_str() + " is not a prime power");
  return WeilContext{g, q, pp->p, pp->a};
}

// a_i for i <= g from the b-prefix of Q: a_i = sum_{j + 2k = i} b_j binom(g - j, k) q^k.
inline std::vector<Int> a_from_b(int g, const Int& q, const std::vector<Int>& b) {
  const std::size_t n = b.size();
  std::vector<Int> a(n);
  for (std::size_t i = 1; i <= n; ++i) {
    Int acc = b[i - 1];
    Int qk = 1;
    for (std::size_t k = 1; 2 * k <= i; ++k) {
      qk *= q;
      const std::size_t j = i - 2 * k;
      const Int& bj = j == 0 ? Int(1) : b[j - 1];
      acc += bj * binomial(g - j, k) * qk;
    }
    a[i - 1] = acc;
  }
  return a;
}

inline std::vector<Int> b_from_a(int g, const Int& q, const std::vector<Int>& a) {
  const std::size_t n = a.size();
  std::vector<Int> b(n);
  for (std::size_t i = 1; i <= n; ++i) {
    Int acc = a[i - 1];
    Int qk = 1;
    for (std::size_t k = 1; 2 * k <= i; ++k) {
      qk *= q;
      const std::size_t j = i - 2 * k;
      const Int bj = j == 0 ? Int(1) : b[j - 1];
      acc -= bj * binomial(g - j, k) * qk;
    }
    b[i - 1] = acc;
  }
  return b;
}

class WeilPoly {
 public:
  WeilPoly() = default;

  // From a_1..a_g, completing with a_{2g-i} = q^{g-i} a_i.
  static WeilPoly from_half(const WeilContext& ctx, const std::vector<Int>& half) {
    if (static_cast<int>(half.size()) != ctx.g) throw std::invalid_argument("expected g coefficients");
    WeilPoly w;
    w.ctx_ = ctx;
    const int g = ctx.g;
    w.a_.assign(2 * g + 1, Int(0));
    w.a_[0] = 1;
    for (int i = 1; i <= g; ++i) w.a_[i] = half[i - 1];
    for (int i = 0; i < g; ++i) w.a_[2 * g - i] = ipow(ctx.q, g - i) * w.a_[i];
    return w;
  }

  // From a monic polynomial of degree 2g; throws unless the functional equation holds.
  static WeilPoly from_poly(const WeilContext& ctx, const IntPoly& P) {
    if (P.degree() != 2 * ctx.g || !P.is_monic()) throw std::invalid_argument("not a monic polynomial of degree 2g");
    std::vector<Int> half(ctx.g);
    for (int i = 1; i <= ctx.g; ++i) half[i - 1] = P[2 * ctx.g - i];
    WeilPoly w = from_half(ctx, half);
    if (w.poly() != P) throw std::invalid_argument("polynomial violates the functional equation");
    return w;
  }

  const WeilContext& context() const { return ctx_; }
  int g() const { return ctx_.g; }
  const Int& q() const { return ctx_.q; }
  // a_i: coefficient of T^{2g-i}
  const Int& a(int i) const { return a_.at(i); }
  const std::vector<Int>& a_all() const { return a_; }
  std::vector<Int> half() const { return std::vector<Int>(a_.begin() + 1, a_.begin() + 1 + ctx_.g); }

  IntPoly poly() const {
    std::vector<Int> c(a_.rbegin(), a_.rend());
    return IntPoly(std::move(c));
  }
  // L(T) = T^{2g} P(1/T)
  IntPoly lpoly() const { return IntPoly(a_); }

  friend bool operator==(const WeilPoly& x, const WeilPoly& y) { return x.ctx_ == y.ctx_ && x.a_ == y.a_; }
  friend bool operator<(const WeilPoly& x, const WeilPoly& y) { return x.a_ < y.a_; }

 private:
  WeilContext ctx_;
  std::vector<Int> a_;
};

// Q(T) with P(T) = T^g Q(T + q/T).
struct RealWeilPoly {
  std::vector<Int> b;  // b_1..b_g
  Int q;

  IntPoly poly() const {
    const std::size_t g = b.size();
    std::vector<Int> c(g + 1);
    c[g] = 1;
    for (std::size_t j = 1; j <= g; ++j) c[g - j] = b[j - 1];
    return IntPoly(std::move(c));
  }
};

inline RealWeilPoly real_weil(const WeilPoly& P) { return RealWeilPoly{b_from_a(P.g(), P.q(), P.half()), P.q()}; }

inline WeilPoly weil_from_real(const WeilContext& ctx, const RealWeilPoly& Q) {
  return WeilPoly::from_half(ctx, a_from_b(ctx.g, ctx.q, Q.b));
}

// Real polynomial Q of degree g from the monic Q polynomial (lowest first).
inline RealWeilPoly real_weil_from_poly(const IntPoly& Qp, const Int& q) {
  if (!Qp.is_monic()) throw std::invalid_argument("Q must be monic");
  const int g = Qp.degree();
  std::vector<Int> b(g);
  for (int j = 1; j <= g; ++j) b[j - 1] = Qp[g - j];
  return RealWeilPoly{b, q};
}

// T^d h(T + q/T) for a polynomial h of degree d.
inline IntPoly weil_lift(const IntPoly& h, const Int& q) {
  const int d = h.degree();
  IntPoly acc;
  IntPoly base(std::vector<Int>{q, 0, 1});  // T^2 + q
  for (int j = 0; j <= d; ++j) {
    if (h[j] == 0) continue;
    // T^d (T + q/T)^j = T^{d-j} (T^2 + q)^j
    acc += IntPoly::monomial(h[j], d - j) * pow(base, j);
  }
  return acc;
}

inline SqrtQInt two_sqrt_q(const Int& q) { return SqrtQInt(0, 2, q); }

// True iff every root of f (with multiplicity) is real and lies in [-2 sqrt q, 2 sqrt q].
inline bool real_rooted_in_weil_interval(const IntPoly& f, const Int& q) {
  if (f.degree() <= 0) return true;
  IntPoly s = squarefree_part(f);
  return sturm_roots_in_interval(s, -two_sqrt_q(q), two_sqrt_q(q)) == s.degree();
}

// Functional equation plus real-rootedness of the associated Q.
inline bool is_weil_polynomial(const IntPoly& P, const Int& q) {
  if (P.is_zero() || !P.is_monic() || P.degree() % 2 != 0 || P.degree() == 0) return false;
  const int g = P.degree() / 2;
  std::vector<Int> half(g);
  for (int i = 1; i <= g; ++i) half[i - 1] = P[2 * g - i];
  for (int i = 0; i <= g; ++i)
    if (P[i] != ipow(q, g - i) * P[2 * g - i]) return false;
  RealWeilPoly Q{b_from_a(g, q, half), q};
  return real_rooted_in_weil_interval(Q.poly(), q);
}

inline bool is_weil_polynomial(const WeilPoly& P) { return is_weil_polynomial(P.poly(), P.q()); }

// ---------------------------------------------------------------------------
// Search tree over the b-prefix of Q.

struct SearchNode {
  std::vector<Int> b;               // b_1..b_i fixed so far
  std::vector<long double> crit;    // approximate roots of D_i, ascending
};

namespace detail {

// D_i(x) = sum_{j<=i} b_j binom(g-j, i-j) x^{i-j}, proportional to Q^{(g-i)}; lowest degree first.
inline IntPoly derivative_level(int g, const std::vector<Int>& b, std::size_t i) {
  std::vector<Int> c(i + 1);
  for (std::size_t j = 0; j <= i; ++j) {
    const Int bj = j == 0 ? Int(1) : b[j - 1];
    c[i - j] = bj * binomial(g - j, i - j);
  }
  return IntPoly(std::move(c));
}

inline long double eval_ld(const std::vector<long double>& c, long double x) {
  long double acc = 0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

inline std::vector<long double> to_ld(const IntPoly& f) {
  std::vector<long double> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = static_cast<long double>(f.at(i).get_d());
  return c;
}

// Roots of f, one in each bracket [t_k, t_{k+1}] where f is monotone.
inline std::vector<long double> bracketed_roots(const std::vector<long double>& c, const std::vector<long double>& t) {
  std::vector<long double> roots;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    long double lo = t[k], hi = t[k + 1];
    long double flo = eval_ld(c, lo), fhi = eval_ld(c, hi);
    if (flo == 0) {
      roots.push_back(lo);
      continue;
    }
    if (fhi == 0) {
      roots.push_back(hi);
      continue;
    }
    if ((flo > 0) == (fhi > 0)) {
      // touching root at the closer endpoint (numerical noise near multiple roots)
      roots.push_back(std::fabs(flo) < std::fabs(fhi) ? lo : hi);
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      long double mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      long double fm = eval_ld(c, mid);
      if (fm == 0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(lo + (hi - lo) / 2);
  }
  return roots;
}

}  // namespace detail

inline SearchNode root_node() { return SearchNode{}; }

// Exact test that b_1..b_i (with i = b.size()) keeps D_i real-rooted in the Weil interval.
inline bool rolle_ok(const WeilContext& ctx, const std::vector<Int>& b) {
  return real_rooted_in_weil_interval(detail::derivative_level(ctx.g, b, b.size()), ctx.q);
}

// Exactly the integers c such that prefix + c passes the Rolle test; nullopt when empty.
inline std::optional<std::pair<Int, Int>> coefficient_range(const WeilContext& ctx, const SearchNode& node) {
  const std::size_t i = node.b.size() + 1;
  if (static_cast<int>(i) > ctx.g) throw std::logic_error("coefficient_range past the last level");
  std::vector<Int> b = node.b;
  b.push_back(0);
  IntPoly S = detail::derivative_level(ctx.g, b, i);  // constant term is the free coefficient, here 0
  auto Sc = detail::to_ld(S);
  const long double A = 2.0L * std::sqrt(static_cast<long double>(ctx.q.get_d()));
  std::vector<long double> t;
  t.push_back(-A);
  for (long double r : node.crit) t.push_back(r);
  t.push_back(A);
  long double lo = -INFINITY, hi = INFINITY, scale = 1;
  for (std::size_t k = 0; k < t.size(); ++k) {
    long double v = -detail::eval_ld(Sc, t[k]);
    scale = std::max(scale, std::fabs(v));
    if ((i - k) % 2 == 0)
      lo = std::max(lo, v);
    else
      hi = std::min(hi, v);
  }
  auto valid = [&](const Int& c) {
    b.back() = c;
    return rolle_ok(ctx, b);
  };
  const long double tol = 1e-9L * scale;
  Int L(static_cast<double>(std::ceil(lo - tol)));
  Int U(static_cast<double>(std::floor(hi + tol)));
  if (L > U) {
    // numerically empty; probe the integers around the estimate for a degenerate point interval
    Int c0(static_cast<double>(std::floor(lo)));
    for (Int c = c0 - 1; c <= c0 + 2; ++c) {
      if (valid(c)) {
        L = U = c;
        while (valid(L - 1)) --L;
        while (valid(U + 1)) ++U;
        return std::make_pair(L, U);
      }
    }
    return std::nullopt;
  }
  if (valid(L)) {
    while (valid(L - 1)) --L;
  } else {
    while (L <= U && !valid(L)) ++L;
    if (L > U) {
      if (valid(U + 1)) {
        L = U = U + 1;
        while (valid(U + 1)) ++U;
        return std::make_pair(L, U);
      }
      return std::nullopt;
    }
  }
  if (valid(U)) {
    while (valid(U + 1)) ++U;
  } else {
    while (U > L && !valid(U)) --U;
  }
  return std::make_pair(L, U);
}

inline SearchNode child(const WeilContext& ctx, const SearchNode& node, const Int& c) {
  SearchNode out;
  out.b = node.b;
  out.b.push_back(c);
  const long double A = 2.0L * std::sqrt(static_cast<long double>(ctx.q.get_d()));
  std::vector<long double> t;
  t.push_back(-A);
  for (long double r : node.crit) t.push_back(r);
  t.push_back(A);
  out.crit = detail::bracketed_roots(detail::to_ld(detail::derivative_level(ctx.g, out.b, out.b.size())), t);
  return out;
}

// ---------------------------------------------------------------------------
// Prunes. Each returns true when the node survives.

// Power sums of the roots of Q (the beta_i), sigma_0..sigma_n, from the b-prefix.
inline std::vector<Int> real_power_sums(int g, const std::vector<Int>& b, std::size_t n) {
  std::vector<Int> s(n + 1);
  s[0] = g;
  for (std::size_t k = 1; k <= n; ++k) {
    Int acc = b[k - 1] * static_cast<unsigned long>(k);
    for (std::size_t j = 1; j < k; ++j) acc += b[j - 1] * s[k - j];
    s[k] = -acc;
  }
  return s;
}

// |s_i| <= 2g q^{i/2} for the power sums of the roots of P available from the prefix.
inline bool prune_power_sums(const WeilContext& ctx, const std::vector<Int>& b) {
  const std::size_t n = b.size();
  std::vector<Int> a = a_from_b(ctx.g, ctx.q, b);
  std::vector<Int> s(n + 1);
  s[0] = 2 * ctx.g;
  const Int bound2 = Int(4 * ctx.g * ctx.g);
  for (std::size_t k = 1; k <= n; ++k) {
    Int acc = a[k - 1] * static_cast<unsigned long>(k);
    for (std::size_t j = 1; j < k; ++j) acc += a[j - 1] * s[k - j];
    s[k] = -acc;
    if (s[k] * s[k] > bound2 * ipow(ctx.q, k)) return false;
  }
  return true;
}

// Q(T + 2 sqrt q) and (-1)^g Q(-T - 2 sqrt q) have nonnegative coefficients; the top ones are fixed by the prefix.
inline bool prune_descartes(const WeilContext& ctx, const std::vector<Int>& b) {
  const int g = ctx.g;
  const SqrtQInt A = two_sqrt_q(ctx.q);
  const SqrtQInt one(Int(1), ctx.q);
  for (std::size_t k = 1; k <= b.size(); ++k) {
    SqrtQInt plus(Int(0), ctx.q), minus(Int(0), ctx.q);
    SqrtQInt Apow = one;
    for (std::size_t j = k + 1; j-- > 0;) {
      // term j contributes b_j binom(g-j, k-j) A^{k-j}
      const Int bj = j == 0 ? Int(1) : b[j - 1];
      SqrtQInt term = Apow * Int(bj * binomial(g - j, k - j));
      plus = plus + term;
      minus = (j % 2 == 0) ? minus + term : minus - term;
      Apow = Apow * A;
    }
    if (plus.sign() < 0 || minus.sign() < 0) return false;
  }
  return true;
}

// Leading principal minors of the Hankel matrix of the sigma_k are nonnegative.
inline bool prune_hamburger(const WeilContext& ctx, const std::vector<Int>& b) {
  const std::size_t n = b.size();
  auto s = real_power_sums(ctx.g, b, n);
  for (std::size_t m = 1; 2 * (m - 1) <= n; ++m) {
    // fraction-free determinant of [s_{r+c}]_{r,c < m}
    std::vector<std::vector<Int>> M(m, std::vector<Int>(m));
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) M[r][c] = s[r + c];
    Int prev = 1;
    int sg = 1;
    bool zero = false;
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t piv = k;
      while (piv < m && M[piv][k] == 0) ++piv;
      if (piv == m) {
        zero = true;
        break;
      }
      if (piv != k) {
        std::swap(M[piv], M[k]);
        sg = -sg;
      }
      for (std::size_t r = k + 1; r < m; ++r) {
        for (std::size_t c = k + 1; c < m; ++c) {
          Int v = M[r][c] * M[k][k] - M[r][k] * M[k][c];
          mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
          M[r][c] = v;
        }
        M[r][k] = 0;
      }
      prev = M[k][k];
    }
    if (!zero && sg * sgn(M[m - 1][m - 1]) < 0) return false;
  }
  return true;
}

// sum over roots of (A - beta)^i (A + beta)^j >= 0 for i + j <= min(prefix length, max_total).
inline bool prune_hausdorff(const WeilContext& ctx, const std::vector<Int>& b, int i_max, int j_max) {
  const int n = static_cast<int>(b.size());
  auto s = real_power_sums(ctx.g, b, n);
  const SqrtQInt A = two_sqrt_q(ctx.q);
  const SqrtQInt zero(Int(0), ctx.q), one(Int(1), ctx.q);
  const int total_max = std::min(n, 2 * ctx.g);
  for (int i = 0; i <= i_max; ++i) {
    for (int j = 0; j <= j_max; ++j) {
      if (i + j == 0 || i + j > total_max) continue;
      // coefficients of (A - x)^i (A + x)^j in x
      std::vector<SqrtQInt> poly{one};
      auto mul_lin = [&](const SqrtQInt& c0, int c1) {
        std::vector<SqrtQInt> r(poly.size() + 1, zero);
        for (std::size_t k = 0; k < poly.size(); ++k) {
          r[k] = r[k] + poly[k] * c0;
          r[k + 1] = r[k + 1] + poly[k] * Int(c1);
        }
        poly = std::move(r);
      };
      for (int k = 0; k < i; ++k) mul_lin(A, -1);
      for (int k = 0; k < j; ++k) mul_lin(A, 1);
      SqrtQInt acc = zero;
      for (std::size_t k = 0; k < poly.size(); ++k) acc = acc + poly[k] * s[k];
      if (acc.sign() < 0) return false;
    }
  }
  return true;
}

inline bool all_prunes(const WeilContext& ctx, const std::vector<Int>& b) {
  return prune_power_sums(ctx, b) && prune_descartes(ctx, b) && prune_hamburger(ctx, b) &&
         prune_hausdorff(ctx, b, 2 * ctx.g, 2 * ctx.g);
}

// ---------------------------------------------------------------------------
// Enumeration.

struct EnumerateOptions {
  unsigned jobs = 1;
  std::function<bool(const WeilPoly&)> filter;  // optional; applied after verification
};

namespace detail {

template <class Emit>
void enumerate_below(const WeilContext& ctx, const SearchNode& node, Emit& emit) {
  auto range = coefficient_range(ctx, node);
  if (!range) return;
  const bool leaf = static_cast<int>(node.b.size()) + 1 == ctx.g;
  for (Int c = range->first; c <= range->second; ++c) {
    if (leaf) {
      std::vector<Int> b = node.b;
      b.push_back(c);
      WeilPoly P = weil_from_real(ctx, RealWeilPoly{std::move(b), ctx.q});
      if (!is_weil_polynomial(P))
        throw ConsistencyError("enumerated leaf failed verification: " + P.poly().to_string('T'));
      emit(std::move(P));
      continue;
    }
    std::vector<Int> b = node.b;
    b.push_back(c);
    if (!all_prunes(ctx, b)) continue;
    enumerate_below(ctx, child(ctx, node, c), emit);
  }
}

}  // namespace detail

// Calls sink on every Weil polynomial of degree 2g, in lexicographic order of (a_1, ..., a_g).
// With jobs > 1 the top-level values are dealt round-robin to workers and merged in order.
inline void for_each_weil(const WeilContext& ctx, const std::function<void(const WeilPoly&)>& sink,
                          const EnumerateOptions& opt = {}) {
  auto pass = [&](const WeilPoly& P) { return !opt.filter || opt.filter(P); };
  SearchNode root = root_node();
  auto top = coefficient_range(ctx, root);
  if (!top) return;
  std::vector<Int> values;
  for (Int c = top->first; c <= top->second; ++c) values.push_back(c);

  auto run_one = [&](const Int& c, auto&& emit) {
    if (ctx.g == 1) {
      WeilPoly P = weil_from_real(ctx, RealWeilPoly{{c}, ctx.q});
      if (!is_weil_polynomial(P))
        throw ConsistencyError("enumerated leaf failed verification: " + P.poly().to_string('T'));
      emit(std::move(P));
      return;
    }
    if (!all_prunes(ctx, {c})) return;
    detail::enumerate_below(ctx, child(ctx, root, c), emit);
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(values.size())));
  if (jobs == 1) {
    auto emit = [&](WeilPoly&& P) {
      if (pass(P)) sink(P);
    };
    for (const Int& c : values) run_one(c, emit);
    return;
  }
  std::vector<std::vector<WeilPoly>> buckets(values.size());
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < values.size(); k += jobs) {
            auto emit = [&](WeilPoly&& P) {
              if (pass(P)) buckets[k].push_back(std::move(P));
            };
            run_one(values[k], emit);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& bucket : buckets)
    for (auto& P : bucket) sink(P);
}

inline std::vector<WeilPoly> enumerate_weil(const WeilContext& ctx, const EnumerateOptions& opt = {}) {
  std::vector<WeilPoly> out;
  for_each_weil(ctx, [&](const WeilPoly& P) { out.push_back(P); }, opt);
  return out;
}

inline std::vector<WeilPoly> enumerate_weil(int g, const Int& q, const EnumerateOptions& opt = {}) {
  return enumerate_weil(make_context(g, q), opt);
}

}  // namespace weilcat
