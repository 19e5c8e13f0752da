#pragma once

#include <vector>

#include "weilcat/poly.hpp"
#include "weilcat/sqrtq.hpp"

namespace weilcat {

// Sturm chain of a squarefree polynomial built from sign-corrected pseudo-remainders.
inline std::vector<IntPoly> sturm_sequence(const IntPoly& f) {
  std::vector<IntPoly> seq;
  if (f.is_zero()) return seq;
  seq.push_back(f);
  if (f.degree() == 0) return seq;
  seq.push_back(f.derivative().primitive_part());
  for (;;) {
    const IntPoly& a = seq[seq.size() - 2];
    const IntPoly& b = seq.back();
    if (b.degree() == 0) break;
    IntPoly r = pseudo_rem(a, b);
    if (r.is_zero()) break;
    const int e = a.degree() - b.degree() + 1;
    if (b.lead() < 0 && e % 2 == 1) r = -r;
    Int c = r.content();
    seq.push_back(-r.exact_div(c));
  }
  return seq;
}

inline int sign_variations(const std::vector<IntPoly>& seq, const SqrtQInt& x) {
  int last = 0, count = 0;
  for (const auto& s : seq) {
    int sg = sign_at(s, x);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++count;
    last = sg;
  }
  return count;
}

// Number of distinct real roots of f in the closed interval [lo, hi].
inline int sturm_roots_in_interval(const IntPoly& f, const SqrtQInt& lo, const SqrtQInt& hi) {
  if (f.degree() <= 0) return 0;
  if (hi < lo) return 0;
  IntPoly sf = squarefree_part(f);
  auto seq = sturm_sequence(sf);
  int n = sign_variations(seq, lo) - sign_variations(seq, hi);
  if (sign_at(sf, lo) == 0) ++n;
  return n;
}

inline int sturm_roots_in_interval(const IntPoly& f, const Int& lo, const Int& hi) {
  return sturm_roots_in_interval(f, SqrtQInt(lo, Int(1)), SqrtQInt(hi, Int(1)));
}

// Distinct real roots over all of R, using +-infinity sign rules.
inline int real_root_count(const IntPoly& f) {
  if (f.degree() <= 0) return 0;
  auto seq = sturm_sequence(squarefree_part(f));
  int vneg = 0, vpos = 0, lneg = 0, lpos = 0;
  for (const auto& s : seq) {
    int sp = sgn(s.lead());
    int sn = s.degree() % 2 == 0 ? sp : -sp;
    if (lpos != 0 && sp != lpos) ++vpos;
    if (lneg != 0 && sn != lneg) ++vneg;
    lpos = sp;
    lneg = sn;
  }
  return vneg - vpos;
}

}  // namespace weilcat
