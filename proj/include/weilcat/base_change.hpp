#pragma once

#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "weilcat/weil.hpp"

namespace weilcat {

namespace detail {

// prod (T - alpha^r) from the power sums s_r, s_2r, ..., s_{nr}.
inline IntPoly base_change_power_sums(const IntPoly& f, unsigned long r) {
  const std::size_t n = static_cast<std::size_t>(f.degree());
  auto all = power_sums(f, n * r);
  PowerSums sub;
  sub.s.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) sub.s[j] = all.s[j * r];
  return poly_from_power_sums(sub, n);
}

// Res_U(f(U), t - (U^r mod f)) at n + 1 integer points, then Lagrange interpolation.
inline IntPoly base_change_resultant(const IntPoly& f, unsigned long r) {
  const int n = f.degree();
  IntPoly acc = IntPoly::constant(1), base = IntPoly::x();
  for (unsigned long e = r; e > 0; e >>= 1) {
    if (e & 1) acc = divmod_monic(acc * base, f).second;
    base = divmod_monic(base * base, f).second;
  }
  std::vector<Rat> xs, ys;
  for (int t = 0; t <= n; ++t) {
    IntPoly b = IntPoly::constant(t) - acc;
    xs.emplace_back(t);
    ys.emplace_back(b.is_zero() ? Int(0) : resultant(f, b));
  }
  // Newton divided differences, then expand
  std::vector<Rat> coef = ys;
  for (int k = 1; k <= n; ++k)
    for (int i = n; i >= k; --i) coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - k]);
  std::vector<Rat> poly(1, coef[n]);
  for (int k = n - 1; k >= 0; --k) {
    std::vector<Rat> next(poly.size() + 1, Rat(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * xs[k];
    }
    next[0] += coef[k];
    poly = std::move(next);
  }
  std::vector<Int> out;
  for (auto& c : poly) {
    c.canonicalize();
    if (c.get_den() != 1) throw ConsistencyError("interpolated base change is not integral");
    out.push_back(c.get_num());
  }
  return IntPoly(std::move(out));
}

}  // namespace detail

// prod (T - alpha_i^r), computed two ways that must agree.
inline IntPoly base_change_poly(const IntPoly& f, unsigned long r) {
  if (r == 0) throw std::invalid_argument("base change degree must be positive");
  if (r == 1) return f;
  IntPoly a = detail::base_change_power_sums(f, r);
  IntPoly b = detail::base_change_resultant(f, r);
  if (a != b) throw ConsistencyError("base change methods disagree for r = " + std::to_string(r));
  return a;
}

inline WeilContext extend_context(const WeilContext& ctx, unsigned long r) {
  return WeilContext{ctx.g, ipow(ctx.q, r), ctx.p, static_cast<unsigned>(ctx.a * r)};
}

inline WeilPoly base_change(const WeilPoly& P, unsigned long r) {
  return WeilPoly::from_poly(extend_context(P.context(), r), base_change_poly(P.poly(), r));
}

// Primitive integer polynomial whose roots are alpha_i beta_j / q (with multiplicity).
// These have absolute value 1; the root-of-unity ones are alpha_i / conj(beta_j).
inline IntPoly ratio_polynomial(const WeilPoly& P, const WeilPoly& Q) {
  if (P.g() != Q.g() || P.q() != Q.q()) throw std::invalid_argument("ratio polynomial needs equal g and q");
  const std::size_t n = static_cast<std::size_t>(4 * P.g() * P.g());
  auto sp = power_sums(P.poly(), n), sq = power_sums(Q.poly(), n);
  std::vector<Rat> s(n + 1);
  Int qk = 1;
  for (std::size_t k = 0; k <= n; ++k) {
    s[k] = Rat(sp.s[k] * sq.s[k], qk);
    s[k].canonicalize();
    qk *= P.q();
  }
  auto c = rational_poly_from_power_sums(s, n);
  Int den = 1;
  for (auto& v : c) den = lcm(den, Int(v.get_den()));
  std::vector<Int> out;
  for (auto& v : c) out.push_back(Int(v * den));
  return IntPoly(std::move(out)).primitive_part();
}

// Orders r with Phi_r dividing the ratio polynomial.
inline std::vector<unsigned long> twist_orders(const WeilPoly& P, const WeilPoly& Q) {
  return cyclotomic_orders(ratio_polynomial(P, Q));
}

inline constexpr unsigned long kTwistDegreeCap = 1000000;

// lcm of the twist orders, or nullopt past the cap.
inline std::optional<unsigned long> twist_candidates(const WeilPoly& P, const WeilPoly& Q) {
  Int m = 1;
  for (unsigned long r : twist_orders(P, Q)) {
    m = lcm(m, Int(r));
    if (m > kTwistDegreeCap) return std::nullopt;
  }
  return m.get_ui();
}

inline bool are_twists(const WeilPoly& P, const WeilPoly& Q) {
  if (P.g() != Q.g() || P.q() != Q.q()) return false;
  if (P == Q) return true;
  auto orders = twist_orders(P, Q);
  if (orders.empty()) return false;
  Int m = 1;
  for (unsigned long r : orders) m = lcm(m, Int(r));
  if (m > kTwistDegreeCap) throw std::overflow_error("twist degree exceeds cap");
  return base_change_poly(P.poly(), m.get_ui()) == base_change_poly(Q.poly(), m.get_ui());
}

}  // namespace weilcat
