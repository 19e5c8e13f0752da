#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

#include "weilcat/poly.hpp"

namespace weilcat {

inline int moebius(unsigned long n) {
  int mu = 1;
  for (unsigned long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

inline unsigned long phi(unsigned long n) {
  unsigned long r = n;
  for (unsigned long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      while (n % d == 0) n /= d;
      r -= r / d;
    }
  }
  if (n > 1) r -= r / n;
  return r;
}

// Phi_n = prod_{d | n} (x^d - 1)^mu(n/d)
inline IntPoly cyclotomic_polynomial(unsigned long n) {
  IntPoly num = IntPoly::constant(1), den = IntPoly::constant(1);
  for (unsigned long d = 1; d <= n; ++d) {
    if (n % d) continue;
    int mu = moebius(n / d);
    if (mu == 0) continue;
    IntPoly t = IntPoly::monomial(1, d) - IntPoly::constant(1);
    (mu > 0 ? num : den) *= t;
  }
  return divide_exact(num, den);
}

// Orders n with phi(n) <= d, ascending.
inline std::vector<unsigned long> orders_with_phi_at_most(unsigned long d) {
  std::vector<unsigned long> out;
  const unsigned long limit = 2 * d * d + 6;
  for (unsigned long n = 1; n <= limit; ++n)
    if (phi(n) <= d) out.push_back(n);
  return out;
}

// g(x^2) = (-1)^deg f * f(x) f(-x): roots are the squares of the roots of f.
inline IntPoly graeffe(const IntPoly& f) {
  IntPoly prod = f * f.negate_var();
  std::vector<Int> c;
  for (std::size_t i = 0; i < prod.size(); i += 2) c.push_back(prod[i]);
  IntPoly r(std::move(c));
  return f.degree() % 2 ? -r : r;
}

namespace detail {

inline IntPoly strip_x(IntPoly f) {
  while (!f.is_zero() && f[0] == 0) {
    std::vector<Int> c(f.coeffs().begin() + 1, f.coeffs().end());
    f = IntPoly(std::move(c));
  }
  return f;
}

// Largest divisor of f whose root set is closed under x -> s*x^2 (s = +-1); such roots are roots of unity.
inline IntPoly stable_under_squaring(IntPoly h, bool negate) {
  for (;;) {
    if (h.degree() <= 0) return IntPoly::constant(1);
    IntPoly t = (negate ? h.negate_var() : h).inflate(2);
    IntPoly next = gcd(h, t);
    if (next.degree() == h.degree()) return h.primitive_part();
    h = next;
  }
}

// f squarefree with f(0) != 0.
inline IntPoly cyclotomic_part_sqf(const IntPoly& f) {
  if (f.degree() <= 0) return IntPoly::constant(1);
  // odd orders: zeta^2 is again a root; orders 2 mod 4: -zeta^2 is again a root
  IntPoly a = stable_under_squaring(gcd(f, f.inflate(2)), false);
  IntPoly b = stable_under_squaring(gcd(f, f.negate_var().inflate(2)), true);
  // orders divisible by 4: -zeta is a root and zeta^2 is a root of unity of even order
  IntPoly c = IntPoly::constant(1);
  IntPoly sym = gcd(f, f.negate_var());
  if (sym.degree() > 0) {
    IntPoly sq = squarefree_part(graeffe(sym));
    if (sq.degree() < sym.degree()) c = gcd(sym, cyclotomic_part_sqf(sq).inflate(2));
  }
  return gcd(f, a * b * c).primitive_part();
}

}  // namespace detail

// Product of the distinct cyclotomic factors of f, using only gcds with f(-x), f(x^2), f(-x^2)
// and a recursion on the Graeffe transform of the part symmetric under x -> -x.
inline IntPoly cyclotomic_part(const IntPoly& f) {
  if (f.is_zero()) throw std::domain_error("cyclotomic_part of zero polynomial");
  IntPoly f0 = detail::strip_x(squarefree_part(f));
  return detail::cyclotomic_part_sqf(f0);
}

inline const IntPoly& cached_cyclotomic(unsigned long n) {
  static std::mutex mu;
  static std::map<unsigned long, IntPoly> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, cyclotomic_polynomial(n)).first;
  return it->second;  // map nodes are stable
}

// Orders n of the cyclotomic polynomials dividing f, ascending, by trial division of its cyclotomic part.
inline std::vector<unsigned long> cyclotomic_orders(const IntPoly& f) {
  std::vector<unsigned long> out;
  if (f.is_zero()) return out;
  IntPoly rest = cyclotomic_part(f);
  if (rest.lead() < 0) rest = -rest;
  for (unsigned long n : orders_with_phi_at_most(std::max(rest.degree(), 0))) {
    if (rest.degree() <= 0) break;
    if (phi(n) > static_cast<unsigned long>(rest.degree())) continue;
    const IntPoly& c = cached_cyclotomic(n);
    if (auto quo = exact_quotient(rest, c)) {
      out.push_back(n);
      rest = *quo;
    }
  }
  return out;
}

}  // namespace weilcat
