#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "weilcat/modp.hpp"
#include "weilcat/poly.hpp"

namespace weilcat {

struct UnsupportedDegree : std::domain_error {
  using std::domain_error::domain_error;
};

struct FactorOptions {
  int degree_cap = 16;
  std::uint64_t seed = rng_seed();
};

using Factorization = std::vector<std::pair<IntPoly, unsigned>>;

namespace detail {

inline IntPoly symmetric_mod(const IntPoly& f, const Int& m) {
  Int half = m / 2;
  std::vector<Int> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    mpz_fdiv_r(c[i].get_mpz_t(), f.at(i).get_mpz_t(), m.get_mpz_t());
    if (c[i] > half) c[i] -= m;
  }
  return IntPoly(std::move(c));
}

inline IntPoly reduce_mod(const IntPoly& f, const Int& m) {
  std::vector<Int> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mpz_fdiv_r(c[i].get_mpz_t(), f.at(i).get_mpz_t(), m.get_mpz_t());
  return IntPoly(std::move(c));
}

// Lifts f = a0*b0 (mod p), a0 and b0 monic and coprime, to a factorization modulo p^k.
inline std::pair<IntPoly, IntPoly> hensel_pair(const IntPoly& f, const modp::Poly& a0, const modp::Poly& b0, modp::u64 p,
                                               unsigned k) {
  modp::Poly s, t;
  modp::ext_gcd(a0, b0, p, s, t);
  IntPoly A = modp::lift(a0), B = modp::lift(b0);
  const Int P(static_cast<unsigned long>(p));
  Int pj = P;
  for (unsigned j = 1; j < k; ++j) {
    IntPoly err = f - A * B;
    IntPoly e = err.exact_div(pj);
    modp::Poly em = modp::reduce(e, p);
    modp::Poly te = modp::mul(t, em, p);
    auto [quo, rem] = modp::divmod(te, a0, p);
    modp::Poly dB = modp::add(modp::mul(s, em, p), modp::mul(quo, b0, p), p);
    A += modp::lift(rem) * pj;
    B += modp::lift(dB) * pj;
    pj *= P;
    A = reduce_mod(A, pj);
    B = reduce_mod(B, pj);
  }
  return {A, B};
}

inline std::vector<IntPoly> hensel_multi(const IntPoly& f, const std::vector<modp::Poly>& facs, modp::u64 p, unsigned k) {
  std::vector<IntPoly> out;
  IntPoly cur = f;
  for (std::size_t i = 0; i + 1 < facs.size(); ++i) {
    modp::Poly rest{1};
    for (std::size_t j = i + 1; j < facs.size(); ++j) rest = modp::mul(rest, facs[j], p);
    auto [a, b] = hensel_pair(cur, facs[i], rest, p, k);
    out.push_back(a);
    cur = b;
  }
  out.push_back(cur);
  return out;
}

// Zassenhaus factorization of a monic squarefree polynomial of degree >= 2.
inline std::vector<IntPoly> factor_squarefree_monic(const IntPoly& g, std::uint64_t seed) {
  const int n = g.degree();
  if (n <= 1) return {g};
  // pick the prime giving the fewest modular factors among a few good ones
  std::vector<modp::Poly> best;
  modp::u64 best_p = 0;
  int tried = 0;
  Int pp = 2;
  while (tried < 5) {
    mpz_nextprime(pp.get_mpz_t(), pp.get_mpz_t());
    const modp::u64 p = pp.get_ui();
    modp::Poly gp = modp::reduce(g, p);
    if (!modp::is_squarefree(gp, p)) continue;
    auto facs = modp::factor_squarefree(gp, p, seed);
    ++tried;
    if (best_p == 0 || facs.size() < best.size()) {
      best = std::move(facs);
      best_p = p;
    }
    if (best.size() == 1) return {g};
  }
  // Mignotte-type bound on coefficients of any factor
  Int norm2 = 0;
  for (const auto& c : g.coeffs()) norm2 += c * c;
  Int bound = binomial(n, n / 2) * (isqrt(norm2) + 1);
  const Int P(static_cast<unsigned long>(best_p));
  unsigned k = 1;
  Int M = P;
  while (M <= 2 * bound) {
    M *= P;
    ++k;
  }
  std::vector<IntPoly> lifted = hensel_multi(g, best, best_p, k);
  std::vector<IntPoly> found;
  IntPoly rest = g;
  std::size_t s = 1;
  while (2 * s <= lifted.size()) {
    bool hit = false;
    const std::size_t r = lifted.size();
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    for (;;) {
      IntPoly h = IntPoly::constant(1);
      for (auto i : idx) h = reduce_mod(h * lifted[i], M);
      h = symmetric_mod(h, M);
      bool plausible = true;
      if (rest[0] != 0 && (h[0] == 0 || !mpz_divisible_p(rest[0].get_mpz_t(), h[0].get_mpz_t()))) plausible = false;
      if (plausible) {
        if (auto quo = exact_quotient(rest, h)) {
          found.push_back(h);
          rest = *quo;
          std::vector<IntPoly> remaining;
          for (std::size_t i = 0, j = 0; i < r; ++i) {
            if (j < s && idx[j] == i) {
              ++j;
              continue;
            }
            remaining.push_back(lifted[i]);
          }
          lifted = std::move(remaining);
          hit = true;
          break;
        }
      }
      // next combination
      std::size_t i = s;
      while (i > 0 && idx[i - 1] == r - s + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!hit) ++s;
  }
  if (rest.degree() > 0) found.push_back(rest);
  return found;
}

}  // namespace detail

// Complete factorization of a monic polynomial into monic irreducibles over Z.
inline Factorization factor_over_Z(const IntPoly& f, const FactorOptions& opt = {}) {
  if (f.is_zero()) throw std::domain_error("factor_over_Z of zero polynomial");
  if (!f.is_monic()) throw std::domain_error("factor_over_Z expects a monic polynomial");
  if (f.degree() > opt.degree_cap) throw UnsupportedDegree("degree " + std::to_string(f.degree()) + " exceeds factorization cap");
  Factorization out;
  for (auto& [part, mult] : squarefree_decomposition(f)) {
    for (auto& h : detail::factor_squarefree_monic(part, opt.seed)) out.emplace_back(h, mult);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  return out;
}

inline IntPoly expand(const Factorization& fac) {
  IntPoly r = IntPoly::constant(1);
  for (const auto& [h, m] : fac) r *= pow(h, m);
  return r;
}

}  // namespace weilcat
