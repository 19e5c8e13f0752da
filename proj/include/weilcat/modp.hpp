#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "weilcat/poly.hpp"

namespace weilcat::modp {

using u64 = std::uint64_t;
using Poly = std::vector<u64>;  // lowest degree first, no trailing zeros

inline u64 mulm(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }
inline u64 addm(u64 a, u64 b, u64 p) { return (a + b) % p; }
inline u64 subm(u64 a, u64 b, u64 p) { return (a + p - b) % p; }
inline u64 powm(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulm(r, a, p);
    a = mulm(a, a, p);
    e >>= 1;
  }
  return r;
}
inline u64 invm(u64 a, u64 p) {
  if (a % p == 0) throw std::domain_error("inverse of zero mod p");
  return powm(a, p - 2, p);
}

inline void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int deg(const Poly& f) { return static_cast<int>(f.size()) - 1; }

inline Poly reduce(const IntPoly& f, u64 p) {
  Poly r(f.size());
  Int P(static_cast<unsigned long>(p));
  for (std::size_t i = 0; i < f.size(); ++i) {
    Int t;
    mpz_fdiv_r(t.get_mpz_t(), f.at(i).get_mpz_t(), P.get_mpz_t());
    r[i] = t.get_ui();
  }
  trim(r);
  return r;
}

inline IntPoly lift(const Poly& f) {
  std::vector<Int> c;
  c.reserve(f.size());
  for (u64 v : f) c.emplace_back(static_cast<unsigned long>(v));
  return IntPoly(std::move(c));
}

inline Poly add(const Poly& a, const Poly& b, u64 p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = addm(r[i], b[i], p);
  trim(r);
  return r;
}
inline Poly sub(const Poly& a, const Poly& b, u64 p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = subm(r[i], b[i], p);
  trim(r);
  return r;
}
inline Poly scale(const Poly& a, u64 s, u64 p) {
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mulm(a[i], s, p);
  trim(r);
  return r;
}
inline Poly mul(const Poly& a, const Poly& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  std::vector<unsigned __int128> acc(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] = (acc[i + j] + static_cast<unsigned __int128>(a[i]) * b[j]) % p;
  Poly r(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<u64>(acc[i]);
  trim(r);
  return r;
}

inline std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, u64 p) {
  if (b.empty()) throw std::domain_error("division by zero polynomial mod p");
  if (a.size() < b.size()) return {{}, a};
  Poly r = a;
  Poly q(a.size() - b.size() + 1, 0);
  const u64 inv = invm(b.back(), p);
  const int db = deg(b);
  for (int i = deg(a); i >= db; --i) {
    u64 t = mulm(r[i], inv, p);
    q[i - db] = t;
    if (t == 0) continue;
    for (int j = 0; j <= db; ++j) r[i - db + j] = subm(r[i - db + j], mulm(t, b[j], p), p);
  }
  r.resize(db);
  trim(r);
  trim(q);
  return {q, r};
}
inline Poly mod(const Poly& a, const Poly& b, u64 p) { return divmod(a, b, p).second; }

inline Poly monic(const Poly& a, u64 p) {
  if (a.empty()) return a;
  return scale(a, invm(a.back(), p), p);
}

inline Poly gcd(Poly a, Poly b, u64 p) {
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

// s*a + t*b = gcd (monic).
inline Poly ext_gcd(const Poly& a, const Poly& b, u64 p, Poly& s, Poly& t) {
  Poly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
  while (!r1.empty()) {
    auto [q, r] = divmod(r0, r1, p);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly ns = sub(s0, mul(q, s1, p), p);
    s0 = std::move(s1);
    s1 = std::move(ns);
    Poly nt = sub(t0, mul(q, t1, p), p);
    t0 = std::move(t1);
    t1 = std::move(nt);
  }
  u64 inv = invm(r0.back(), p);
  s = scale(s0, inv, p);
  t = scale(t0, inv, p);
  return scale(r0, inv, p);
}

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& f, u64 p) { return mod(mul(a, b, p), f, p); }

inline Poly powmod(Poly base, Int e, const Poly& f, u64 p) {
  Poly r{1};
  r = mod(r, f, p);
  base = mod(base, f, p);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = mulmod(r, base, f, p);
    e >>= 1;
    if (e > 0) base = mulmod(base, base, f, p);
  }
  return r;
}

inline Poly derivative(const Poly& f, u64 p) {
  if (f.size() <= 1) return {};
  Poly r(f.size() - 1);
  for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = mulm(f[i], i % p, p);
  trim(r);
  return r;
}

inline bool is_squarefree(const Poly& f, u64 p) {
  Poly d = derivative(f, p);
  if (d.empty()) return f.size() <= 1;
  return deg(gcd(f, d, p)) == 0;
}

// Distinct-degree factorization of a monic squarefree polynomial.
inline std::vector<std::pair<Poly, int>> distinct_degree(Poly f, u64 p) {
  std::vector<std::pair<Poly, int>> out;
  Poly x{0, 1};
  Poly h = mod(x, f, p);
  const Int P(static_cast<unsigned long>(p));
  for (int d = 1; 2 * d <= deg(f); ++d) {
    h = powmod(h, P, f, p);
    Poly g = gcd(f, sub(h, x, p), p);
    if (deg(g) > 0) {
      out.emplace_back(g, d);
      f = divmod(f, g, p).first;
      h = mod(h, f, p);
    }
  }
  if (deg(f) > 0) out.emplace_back(f, deg(f));
  return out;
}

// Splits a product of distinct monic irreducibles of degree d (Cantor-Zassenhaus).
inline void equal_degree(const Poly& f, int d, u64 p, std::mt19937_64& rng, std::vector<Poly>& out) {
  if (deg(f) == d) {
    out.push_back(f);
    return;
  }
  const int n = deg(f);
  std::uniform_int_distribution<u64> dist(0, p - 1);
  for (;;) {
    Poly a(n);
    for (auto& v : a) v = dist(rng);
    trim(a);
    if (deg(a) < 1) continue;
    Poly b;
    if (p == 2) {
      // trace map a + a^2 + ... + a^(2^(d-1))
      Poly t = a, acc = a;
      for (int i = 1; i < d; ++i) {
        t = mulmod(t, t, f, p);
        acc = add(acc, t, p);
      }
      b = acc;
    } else {
      Int e = (ipow(Int(static_cast<unsigned long>(p)), d) - 1) / 2;
      b = sub(powmod(a, e, f, p), Poly{1}, p);
    }
    Poly g = gcd(f, b, p);
    if (deg(g) > 0 && deg(g) < n) {
      equal_degree(g, d, p, rng, out);
      equal_degree(divmod(f, g, p).first, d, p, rng, out);
      return;
    }
  }
}

// Monic irreducible factors of a monic squarefree polynomial, sorted.
inline std::vector<Poly> factor_squarefree(const Poly& f, u64 p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Poly> out;
  for (auto& [g, d] : distinct_degree(f, p)) equal_degree(g, d, p, rng, out);
  std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  return out;
}

// Full factorization with multiplicities of a nonzero polynomial (made monic first).
inline std::vector<std::pair<Poly, int>> factor(const Poly& f0, u64 p, std::uint64_t seed) {
  std::vector<std::pair<Poly, int>> out;
  Poly f = monic(f0, p);
  if (deg(f) < 1) return out;
  // squarefree decomposition in characteristic p
  struct Work {
    Poly f;
    int mult;
  };
  std::vector<Work> stack{{f, 1}};
  std::vector<std::pair<Poly, int>> sqf;
  while (!stack.empty()) {
    auto [g, m] = stack.back();
    stack.pop_back();
    if (deg(g) < 1) continue;
    Poly dg = derivative(g, p);
    if (dg.empty()) {
      // g = h(x^p); h^p = g with coefficients' p-th roots (identity on F_p)
      Poly h;
      for (std::size_t i = 0; i < g.size(); i += p) h.push_back(g[i]);
      stack.push_back({h, m * static_cast<int>(p)});
      continue;
    }
    Poly c = gcd(g, dg, p);
    Poly w = divmod(g, c, p).first;
    int i = 1;
    while (deg(w) > 0) {
      Poly y = gcd(w, c, p);
      Poly z = divmod(w, y, p).first;
      if (deg(z) > 0) sqf.emplace_back(z, m * i);
      ++i;
      w = y;
      c = divmod(c, y, p).first;
    }
    if (deg(c) > 0) stack.push_back({c, m});
  }
  for (auto& [g, m] : sqf)
    for (auto& h : factor_squarefree(g, p, seed)) out.emplace_back(h, m);
  std::sort(out.begin(), out.end());
  // merge equal factors arising from different branches
  std::vector<std::pair<Poly, int>> merged;
  for (auto& e : out) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  return merged;
}

}  // namespace weilcat::modp
