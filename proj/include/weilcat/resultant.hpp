#pragma once

#include <stdexcept>
#include <utility>

#include "weilcat/poly.hpp"

namespace weilcat {

// Res(f,g) = lc(f)^deg g * prod g(alpha) over the roots of f; subresultant algorithm.
inline Int resultant(IntPoly a, IntPoly b) {
  if (a.is_zero() || b.is_zero()) throw std::domain_error("resultant of zero polynomial");
  if (a.degree() == 0) return ipow(a.lead(), b.degree());
  if (b.degree() == 0) return ipow(b.lead(), a.degree());
  const Int ca = a.content(), cb = b.content();
  Int t = ipow(ca, b.degree()) * ipow(cb, a.degree());
  a = a.exact_div(ca);
  b = b.exact_div(cb);
  int s = 1;
  if (a.degree() < b.degree()) {
    std::swap(a, b);
    if (a.degree() % 2 == 1 && b.degree() % 2 == 1) s = -s;
  }
  Int g = 1, h = 1;
  for (;;) {
    const int da = a.degree(), db = b.degree();
    const int delta = da - db;
    if (da % 2 == 1 && db % 2 == 1) s = -s;
    IntPoly r = pseudo_rem(a, b);
    a = std::move(b);
    if (r.is_zero()) return 0;
    b = r.exact_div(g * ipow(h, delta));
    g = a.lead();
    if (delta == 1) {
      h = g;
    } else if (delta > 1) {
      Int hd = ipow(h, delta - 1);
      h = ipow(g, delta);
      mpz_divexact(h.get_mpz_t(), h.get_mpz_t(), hd.get_mpz_t());
    }
    if (b.degree() > 0) continue;
    const int dA = a.degree();
    Int num = ipow(b.lead(), dA);
    Int den = ipow(h, dA - 1);
    mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return s * t * num;
  }
}

inline Int discriminant(const IntPoly& f) {
  const int d = f.degree();
  if (d < 1) throw std::domain_error("discriminant of a constant polynomial");
  Int r = resultant(f, f.derivative());
  Int q;
  mpz_divexact(q.get_mpz_t(), r.get_mpz_t(), f.lead().get_mpz_t());
  if ((static_cast<long>(d) * (d - 1) / 2) % 2 == 1) q = -q;
  return q;
}

}  // namespace weilcat
