#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "weilcat/base_change.hpp"
#include "weilcat/padic.hpp"

namespace weilcat {

struct ExponentUnknown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RealCase { none, rational_quaternion, sqrt_p_quaternion };

// Number of real embeddings of Q[T]/h for an irreducible Weil factor: only T -+ sqrt q and T^2 - q have any.
inline int real_place_count(const IntPoly& h, const Int& q) {
  if (h.degree() == 1) return 1;
  if (h.degree() == 2 && h[1] == 0 && h[0] == -q) return 2;
  return 0;
}

inline RealCase real_case(const IntPoly& h, const Int& q) {
  switch (real_place_count(h, q)) {
    case 1: return RealCase::rational_quaternion;
    case 2: return RealCase::sqrt_p_quaternion;
    default: return RealCase::none;
  }
}

struct SimpleFactor {
  IntPoly h;
  unsigned multiplicity = 1;  // m with h^m exactly dividing P
  std::optional<long> e;      // Honda-Tate exponent, absent when undecided
  long n = 0;                 // m / e for valid classes
  long dim = 0;               // deg(h) e / 2
  Int center_disc;
  std::vector<PlaceData> places;
  int real_places = 0;

  std::vector<Rat> invariants() const {
    std::vector<Rat> v;
    for (const auto& pd : places) v.push_back(pd.invariant);
    for (int k = 0; k < real_places; ++k) v.emplace_back(1, 2);
    std::sort(v.begin(), v.end());
    return v;
  }
};

// lcd of the local invariants, including 1/2 at each real place; nullopt when some invariant is not determined.
inline std::optional<long> exponent_if_known(const IntPoly& h, const std::vector<PlaceData>& places, const Int& q) {
  Int e = 1;
  for (const auto& pd : places) {
    if (!pd.invariant_known) return std::nullopt;
    e = lcm(e, Int(pd.invariant.get_den()));
  }
  if (real_place_count(h, q) > 0) e = lcm(e, Int(2));
  return to_long(e);
}

inline long honda_tate_exponent(const IntPoly& h, const WeilContext& ctx) {
  auto e = exponent_if_known(h, padic_places(h, ctx.p, ctx.a), ctx.q);
  if (!e) throw ExponentUnknown("Brauer invariant not determined for " + h.to_string('T'));
  return *e;
}

enum class HTStatus { valid, invalid, undecided };

struct Decomposition {
  HTStatus status = HTStatus::undecided;
  std::vector<SimpleFactor> factors;

  bool valid() const { return status == HTStatus::valid; }
};

inline SimpleFactor analyze_factor(const IntPoly& h, unsigned m, const WeilContext& ctx) {
  SimpleFactor f;
  f.h = h;
  f.multiplicity = m;
  f.places = padic_places(h, ctx.p, ctx.a);
  f.real_places = real_place_count(h, ctx.q);
  f.e = exponent_if_known(h, f.places, ctx.q);
  f.center_disc = h.degree() >= 1 ? (h.degree() == 1 ? Int(1) : discriminant(h)) : Int(1);
  if (f.e) {
    f.dim = h.degree() * *f.e / 2;
    if (m % *f.e == 0) f.n = m / *f.e;
  }
  return f;
}

// Factor P into h_i^{m_i}; valid iff e_i | m_i for all i.
inline Decomposition decompose(const WeilPoly& P) {
  Decomposition d;
  bool unknown = false, bad = false;
  for (const auto& [h, m] : factor_over_Z(P.poly())) {
    d.factors.push_back(analyze_factor(h, m, P.context()));
    const auto& f = d.factors.back();
    if (!f.e)
      unknown = true;
    else if (m % *f.e != 0)
      bad = true;
  }
  d.status = bad ? HTStatus::invalid : unknown ? HTStatus::undecided : HTStatus::valid;
  if (d.valid()) {
    long total = 0;
    for (const auto& f : d.factors) total += f.dim * f.n;
    if (total != P.g()) throw ConsistencyError("simple factor dimensions do not add up to g");
  }
  return d;
}

inline bool is_simple(const Decomposition& d) { return d.valid() && d.factors.size() == 1 && d.factors[0].n == 1; }
inline bool is_simple(const WeilPoly& P) { return is_simple(decompose(P)); }

struct EndoAlgebra {
  IntPoly center;  // of the first simple factor; products list the rest in `factors`
  long e = 1;
  std::vector<PlaceData> places;
  RealCase real = RealCase::none;
  bool commutative = true;
};

inline EndoAlgebra endomorphism_algebra(const SimpleFactor& f, const Int& q) {
  if (!f.e) throw ExponentUnknown("endomorphism algebra needs the exponent");
  EndoAlgebra a;
  a.center = f.h;
  a.e = *f.e;
  a.places = f.places;
  a.real = real_case(f.h, q);
  a.commutative = a.e == 1;
  return a;
}

// (deg h, e, n, invariants) per factor, sorted: what the algebra looks like up to isomorphism type.
using AlgebraSignature = std::vector<std::tuple<int, long, long, std::vector<Rat>>>;

inline AlgebraSignature algebra_signature(const Decomposition& d) {
  if (!d.valid()) throw ExponentUnknown("signature needs a valid decomposition");
  AlgebraSignature s;
  for (const auto& f : d.factors) s.emplace_back(f.h.degree(), *f.e, f.n, f.invariants());
  std::sort(s.begin(), s.end());
  return s;
}

// dim_Q End^0 = sum n^2 e^2 deg h
inline long algebra_dimension(const Decomposition& d) {
  long dim = 0;
  for (const auto& f : d.factors) dim += f.n * f.n * *f.e * *f.e * f.h.degree();
  return dim;
}

// Extension degree after which the endomorphism algebra stops changing: lcm of the self-twist orders.
inline std::optional<unsigned long> stable_degree(const WeilPoly& P) { return twist_candidates(P, P); }

inline std::vector<unsigned long> divisors(unsigned long m) {
  std::vector<unsigned long> d;
  for (unsigned long k = 1; k * k <= m; ++k)
    if (m % k == 0) {
      d.push_back(k);
      if (k * k != m) d.push_back(m / k);
    }
  std::sort(d.begin(), d.end());
  return d;
}

// Smallest r | m whose base change has the same algebra type as the one over F_{q^m}; nullopt if undecided.
inline std::optional<unsigned long> endomorphism_degree(const WeilPoly& P) {
  auto m = stable_degree(P);
  if (!m) return std::nullopt;
  const Decomposition top = decompose(base_change(P, *m));
  if (!top.valid()) return std::nullopt;
  const auto target = algebra_signature(top);
  const long top_dim = algebra_dimension(top);
  for (unsigned long r : divisors(*m)) {
    const Decomposition d = r == *m ? top : decompose(base_change(P, r));
    if (!d.valid()) return std::nullopt;
    if (algebra_dimension(d) > top_dim) throw ConsistencyError("endomorphism algebra shrank under base change");
    if (algebra_signature(d) == target) {
      if (algebra_dimension(d) != top_dim) throw ConsistencyError("equal algebra types with different dimensions");
      return r;
    }
  }
  throw ConsistencyError("no divisor of the stable degree reproduces its algebra");
}

inline std::optional<bool> is_geometrically_simple(const WeilPoly& P) {
  auto m = stable_degree(P);
  if (!m) return std::nullopt;
  const Decomposition d = decompose(base_change(P, *m));
  if (d.status == HTStatus::undecided) return std::nullopt;
  return is_simple(d);
}

}  // namespace weilcat
