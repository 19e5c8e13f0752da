#pragma once

#include <algorithm>
#include <vector>

#include "weilcat/exact_poly.hpp"

namespace weilcat {

// One Q_p-irreducible factor of h, or a piece the splitter could not break up.
struct PlaceData {
  Rat slope;          // v(pi) / v(q)
  long local_degree;  // [K_v : Q_p]; for an unresolved piece, its total degree
  Rat invariant;      // slope * local_degree mod 1, in [0, 1)
  bool resolved = true;
  bool invariant_known = true;  // an unresolved piece may still force its invariant
  long degree_divisor = 1;      // every factor inside the piece has degree divisible by this
};

inline Rat frac_part(const Rat& r) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  Rat out = r - Rat(fl);
  out.canonicalize();
  return out;
}

namespace detail {

struct LocalPiece {
  long degree;
  bool resolved;
  long divisor;  // factor degrees inside the piece are multiples of this
};

struct Segment {
  long i1, i2;  // range of the lowest-first coefficient index
  Int h, e;     // root valuation h/e in lowest terms
};

// Lower hull of {(i, v_p(c_i))}; the roots on a segment have valuation minus its slope.
inline std::vector<Segment> padic_segments(const IntPoly& f, const Int& p) {
  std::vector<std::pair<long, Int>> pts;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.at(i) != 0) pts.emplace_back(static_cast<long>(i), Int(valuation(f.at(i), p)));
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    while (hull.size() >= 2) {
      const auto& [x1, y1] = pts[hull[hull.size() - 2]];
      const auto& [x2, y2] = pts[hull.back()];
      const auto& [x3, y3] = pts[k];
      if ((y2 - y1) * (x3 - x1) >= (y3 - y1) * (x2 - x1))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }
  std::vector<Segment> out;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    const auto& [x1, y1] = pts[hull[k - 1]];
    const auto& [x2, y2] = pts[hull[k]];
    Rat val(Int(y1 - y2), Int(x2 - x1));
    val.canonicalize();
    out.push_back({x1, x2, val.get_num(), val.get_den()});
  }
  return out;
}

// Residual polynomial over F_p, index j standing for x^{i1 + j e}.
inline modp::Poly residual_polynomial(const IntPoly& f, const Segment& s, const Int& p) {
  const long e = to_long(s.e);
  const long k = (s.i2 - s.i1) / e;
  const long v1 = static_cast<long>(valuation(f.at(s.i1), p));
  modp::Poly r(k + 1, 0);
  for (long j = 0; j <= k; ++j) {
    const Int& c = f.at(s.i1 + j * e);
    if (c == 0) continue;
    const long expected = v1 - j * to_long(s.h);
    if (static_cast<long>(valuation(c, p)) > expected) continue;
    Int t = c / ipow(p, expected);
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
    r[j] = t.get_ui();
  }
  modp::trim(r);
  return r;
}

inline std::vector<LocalPiece> positive_pieces(const IntPoly& f, const Int& p, int depth);

// Split the roots on one segment. Regular residual factors give irreducible factors directly; a
// repeated linear factor on an integral slope is resolved by translating to the cluster.
inline std::vector<LocalPiece> segment_pieces(const IntPoly& f, const Segment& s, const Int& p, int depth) {
  const long e = to_long(s.e);
  const long len = s.i2 - s.i1;
  if (len == e) return {{len, true, len}};
  const modp::u64 pp = p.get_ui();
  std::vector<LocalPiece> out;
  for (const auto& [phi, mult] : modp::factor(residual_polynomial(f, s, p), pp, rng_seed())) {
    const long base = e * modp::deg(phi);
    if (mult == 1) {
      out.push_back({base, true, base});
    } else if (e == 1 && modp::deg(phi) == 1 && s.h >= 0 && depth < 64) {
      // alpha = p^h (c + z) with v(z) > 0 picks out exactly this cluster
      const Int c(static_cast<unsigned long>(modp::subm(0, modp::mulm(phi[0], modp::invm(phi[1], pp), pp), pp)));
      const Int ph = ipow(p, to_long(s.h));
      IntPoly g = f.compose(IntPoly(std::vector<Int>{c * ph, ph})).primitive_part();
      auto inner = positive_pieces(g, p, depth + 1);
      long covered = 0;
      for (const auto& piece : inner) covered += piece.degree;
      if (covered != mult) throw ConsistencyError("p-adic cluster lost roots during translation");
      out.insert(out.end(), inner.begin(), inner.end());
    } else {
      out.push_back({base * mult, false, base});
    }
  }
  return out;
}

inline std::vector<LocalPiece> positive_pieces(const IntPoly& f, const Int& p, int depth) {
  std::vector<LocalPiece> out;
  for (const auto& s : padic_segments(f, p)) {
    if (s.h <= 0) continue;
    auto part = segment_pieces(f, s, p, depth);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace detail

// Places of Q(pi) above p for an irreducible Weil factor h over F_q, q = p^a.
inline std::vector<PlaceData> padic_places(const IntPoly& h, const Int& p, unsigned a) {
  std::vector<PlaceData> out;
  for (const auto& s : detail::padic_segments(h, p)) {
    Rat slope(s.h, s.e * a);
    slope.canonicalize();
    for (const auto& piece : detail::segment_pieces(h, s, p, 0)) {
      PlaceData pd;
      pd.slope = slope;
      pd.local_degree = piece.degree;
      pd.resolved = piece.resolved;
      pd.degree_divisor = piece.resolved ? piece.degree : piece.divisor;
      // factor degrees are multiples of degree_divisor, so the invariant is forced when slope * divisor is integral
      pd.invariant_known = piece.resolved || Rat(slope * pd.degree_divisor).get_den() == 1;
      pd.invariant = pd.invariant_known ? frac_part(slope * pd.local_degree) : Rat(0);
      out.push_back(pd);
    }
  }
  return out;
}

}  // namespace weilcat
