#pragma once

#include <optional>
#include <string>

#include "weilcat/honda_tate.hpp"
#include "weilcat/newton.hpp"
#include "weilcat/order.hpp"

namespace weilcat {

enum class PPStatus { yes, no, unknown };
enum class PPRule { g1, g2_howe, odd_g_simple, totally_real, ordinary_norm, cm_ramified, cm_inert, all_factors_pp, none };

struct PPVerdict {
  PPStatus status = PPStatus::unknown;
  PPRule rule = PPRule::none;

  friend bool operator==(const PPVerdict&, const PPVerdict&) = default;
};

inline std::string to_string(PPStatus s) {
  switch (s) {
    case PPStatus::yes: return "yes";
    case PPStatus::no: return "no";
    case PPStatus::unknown: return "unknown";
  }
  return {};
}

inline std::string to_string(PPRule r) {
  switch (r) {
    case PPRule::g1: return "g1";
    case PPRule::g2_howe: return "g2_howe";
    case PPRule::odd_g_simple: return "odd_g_simple";
    case PPRule::totally_real: return "totally_real";
    case PPRule::ordinary_norm: return "ordinary_norm";
    case PPRule::cm_ramified: return "cm_ramified";
    case PPRule::cm_inert: return "cm_inert";
    case PPRule::all_factors_pp: return "all_factors_pp";
    case PPRule::none: return "none";
  }
  return {};
}

// Surfaces: no principal polarization iff a_1^2 - a_2 = q, a_2 < 0 and every prime dividing a_2 is 1 mod 3.
inline bool howe_surface_obstructed(const Int& a1, const Int& a2, const Int& q) {
  if (a1 * a1 - a2 != q || a2 >= 0) return false;
  for (const Int& l : prime_divisors(Int(-a2)))
    if (l % 3 != 1) return false;
  return true;
}

// N_{K/Q}(pi - q/pi) = prod (alpha^2 - q) / prod alpha over the roots of h (deg h even), always positive.
inline Int cm_norm(const IntPoly& h, const Int& q) {
  const Int num = resultant(h, IntPoly(std::vector<Int>{Int(-q), 0, 1}));
  if (h[0] == 0 || num % h[0] != 0) throw ConsistencyError("norm of pi - q/pi is not an integer");
  const Int norm = num / h[0];
  if (norm <= 0) throw ConsistencyError("norm of pi - q/pi is not positive");
  return norm;
}

// Is K = Q(pi) ramified over K+ = Q(pi + q/pi) at some finite prime? Any such prime divides
// N(pi - q/pi), and K/K+ is unramified at ell iff v_ell(d_K) = 2 v_ell(d_K+).
inline bool cm_ramified(const IntPoly& h, const Int& q) {
  const IntPoly hplus = real_weil(WeilPoly::from_poly(make_context(h.degree() / 2, q), h)).poly();
  for (const Int& ell : prime_divisors(cm_norm(h, q)))
    if (local_disc_valuation(h, ell) != 2 * local_disc_valuation(hplus, ell)) return true;
  return false;
}

// Does some prime of K+ dividing pi - q/pi stay undivided in K? Work in A = O/(ell, pi - q/pi) for an
// ell-maximal order O: its Frobenius-fixed elements are spanned by the primitive idempotents, one per prime
// of K containing pi - q/pi, and complex conjugation permutes them. A prime not split over K+ is an orbit
// of size one, so it exists iff #primes < 2 #orbits. Without ramification such a prime is inert.
inline bool cm_nonsplit_divisor(const IntPoly& h, const Int& q) {
  const std::size_t n = h.degree();
  std::vector<Rat> pi(n, Rat(0)), conj(n, Rat(0));
  pi[1] = 1;
  // q/pi = -(q / h(0)) (pi^{n-1} + h_{n-1} pi^{n-2} + ... + h_1)
  for (std::size_t k = 0; k < n; ++k) conj[k] = -Rat(q) * Rat(h.at(k + 1)) / Rat(h.at(0));
  std::vector<Rat> gamma(n);
  for (std::size_t k = 0; k < n; ++k) gamma[k] = pi[k] - conj[k];
  std::vector<std::vector<Rat>> conj_pow{std::vector<Rat>(n, Rat(0))};
  conj_pow[0][0] = 1;
  for (std::size_t j = 1; j < n; ++j) conj_pow.push_back(mul_mod_monic(conj_pow.back(), conj, h));

  for (const Int& ell : prime_divisors(cm_norm(h, q))) {
    const PMaximalOrder O = p_maximal_order(h, ell);
    const auto table = detail::structure_constants(O.basis, O.basis_inv, h);
    const IntMat frob = detail::power_map_mod(table, ell, ell);
    IntMat sigma(n, std::vector<Int>(n)), ideal(n, std::vector<Int>(n));  // columns: images of basis elements
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rat> image(n, Rat(0));
      for (std::size_t j = 0; j < n; ++j)
        if (O.basis[i][j] != 0)
          for (std::size_t k = 0; k < n; ++k) image[k] += O.basis[i][j] * conj_pow[j][k];
      const auto sc = O.coords_mod_p(image);
      const auto gc = O.coords_mod_p(mul_mod_monic(gamma, O.basis[i], h));
      for (std::size_t k = 0; k < n; ++k) {
        sigma[k][i] = sc[k];
        ideal[k][i] = gc[k];
      }
    }
    IntMat one(n, std::vector<Int>(3 * n, Int(0))), two(2 * n, std::vector<Int>(3 * n, Int(0)));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const Int id = r == c ? 1 : 0;
        one[r][c] = two[r][c] = frob[r][c] - id;
        two[n + r][c] = sigma[r][c] - id;
        one[r][n + c] = two[r][n + c] = ideal[r][c];
        two[n + r][2 * n + c] = ideal[r][c];
      }
    const long rank_w = static_cast<long>(rank_mod(ideal, n, ell));
    const long primes = static_cast<long>(n) - static_cast<long>(rank_mod(one, 3 * n, ell));
    const long orbits = static_cast<long>(n) - static_cast<long>(rank_mod(two, 3 * n, ell)) + rank_w;
    if (primes < 2 * orbits) return true;
  }
  return false;
}

// Sufficient conditions for a CM field K = Q(pi): K/K+ ramified at a finite prime, or some prime of K+
// dividing pi - q/pi inert in K. A non-square norm of pi - q/pi already forces ramification.
inline std::optional<PPVerdict> cm_field_verdict(const IntPoly& h, const Int& q) {
  if (!is_square(cm_norm(h, q)) || cm_ramified(h, q)) return PPVerdict{PPStatus::yes, PPRule::cm_ramified};
  if (cm_nonsplit_divisor(h, q)) return PPVerdict{PPStatus::yes, PPRule::cm_inert};
  return std::nullopt;
}

// Simple ordinary classes: after the two CM conditions, the norm is a square N and the class is
// principally polarizable iff N = a_g mod q (mod 4 for q = 2).
inline PPVerdict ordinary_simple_verdict(const WeilPoly& P) {
  const Int norm = cm_norm(P.poly(), P.q());
  const Int mod = P.q() == 2 ? Int(4) : P.q();
  if (is_square(norm) && Int(isqrt(norm) - P.a(P.g())) % mod == 0) return {PPStatus::yes, PPRule::ordinary_norm};
  if (auto v = cm_field_verdict(P.poly(), P.q())) return *v;
  return {PPStatus::no, PPRule::ordinary_norm};
}

inline PPVerdict is_principally_polarizable(const WeilPoly& P, const Decomposition& d);

// The class whose characteristic polynomial is h^e.
inline PPVerdict factor_verdict(const SimpleFactor& f, const Int& q) {
  const auto Pf = WeilPoly::from_poly(make_context(static_cast<int>(f.dim), q), pow(f.h, static_cast<unsigned>(*f.e)));
  return is_principally_polarizable(Pf, decompose(Pf));
}

inline PPVerdict is_principally_polarizable(const WeilPoly& P, const Decomposition& d) {
  if (!d.valid()) throw std::invalid_argument("polarization needs a valid decomposition");
  const int g = P.g();
  if (g == 1) return {PPStatus::yes, PPRule::g1};
  const bool simple = is_simple(d);
  if (simple && g % 2 == 1) return {PPStatus::yes, PPRule::odd_g_simple};
  if (simple && d.factors[0].real_places > 0) return {PPStatus::yes, PPRule::totally_real};
  if (g == 2)
    return {howe_surface_obstructed(P.a(1), P.a(2), P.q()) ? PPStatus::no : PPStatus::yes, PPRule::g2_howe};
  if (simple && newton_polygon(P).is_ordinary()) return ordinary_simple_verdict(P);
  if (simple && g % 2 == 0)
    if (auto v = cm_field_verdict(d.factors[0].h, P.q())) return *v;
  if (!simple) {
    bool all = true;
    for (const auto& f : d.factors) all = all && factor_verdict(f, P.q()).status == PPStatus::yes;
    if (all) return {PPStatus::yes, PPRule::all_factors_pp};
  }
  return {};
}

inline PPVerdict is_principally_polarizable(const WeilPoly& P) { return is_principally_polarizable(P, decompose(P)); }

}  // namespace weilcat
