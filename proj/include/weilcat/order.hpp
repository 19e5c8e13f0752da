#pragma once

// Orders in Q[x]/(f): p-maximal orders by the round-two algorithm, enough to read off
// the p-part of a field discriminant without any number-field library.

#include <stdexcept>
#include <vector>

#include "weilcat/resultant.hpp"

namespace weilcat {

using IntMat = std::vector<std::vector<Int>>;
using RatMat = std::vector<std::vector<Rat>>;

namespace detail {

inline Int mod_pos(const Int& a, const Int& p) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
  return r;
}

}  // namespace detail

// Hermite basis (upper triangular, positive pivots) of the full-rank lattice spanned by the rows.
inline IntMat hnf_basis(IntMat a, std::size_t n) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (r >= a.size()) throw std::invalid_argument("lattice is not of full rank");
    for (std::size_t i = r + 1; i < a.size(); ++i) {
      if (a[i][c] == 0) continue;
      Int g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a[r][c].get_mpz_t(), a[i][c].get_mpz_t());
      const Int u = a[r][c] / g, v = a[i][c] / g;
      for (std::size_t k = c; k < n; ++k) {
        Int top = s * a[r][k] + t * a[i][k];
        Int bot = u * a[i][k] - v * a[r][k];
        a[r][k] = std::move(top);
        a[i][k] = std::move(bot);
      }
    }
    if (a[r][c] == 0) throw std::invalid_argument("lattice is not of full rank");
    if (a[r][c] < 0)
      for (auto& x : a[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Int qq;
      mpz_fdiv_q(qq.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
      if (qq != 0)
        for (std::size_t k = c; k < n; ++k) a[i][k] -= qq * a[r][k];
    }
    ++r;
  }
  a.resize(n);
  return a;
}

// Basis of the right kernel of an m x n matrix over F_p.
inline IntMat kernel_mod(IntMat a, std::size_t n, const Int& p) {
  for (auto& row : a)
    for (auto& x : row) x = detail::mod_pos(x, p);
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < a.size(); ++c) {
    std::size_t piv = r;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[r], a[piv]);
    Int inv;
    mpz_invert(inv.get_mpz_t(), a[r][c].get_mpz_t(), p.get_mpz_t());
    for (auto& x : a[r]) x = detail::mod_pos(x * inv, p);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Int f = a[i][c];
      for (std::size_t k = 0; k < n; ++k) a[i][k] = detail::mod_pos(a[i][k] - f * a[r][k], p);
    }
    pivots.push_back(c);
    ++r;
  }
  IntMat out;
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t fcol = 0; fcol < n; ++fcol) {
    if (is_pivot[fcol]) continue;
    std::vector<Int> v(n, Int(0));
    v[fcol] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = detail::mod_pos(-a[k][fcol], p);
    out.push_back(std::move(v));
  }
  return out;
}

inline RatMat inverse(RatMat a) {
  const std::size_t n = a.size();
  RatMat inv(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw std::domain_error("singular matrix");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const Rat d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      const Rat f = a[i][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[i][k] -= f * a[c][k];
        inv[i][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// Multiplication in Q[x]/(f) on power-basis coordinates; f monic.
inline std::vector<Rat> mul_mod_monic(const std::vector<Rat>& a, const std::vector<Rat>& b, const IntPoly& f) {
  const std::size_t n = f.degree();
  std::vector<Rat> prod(2 * n - 1, Rat(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) prod[i + j] += a[i] * b[j];
  }
  for (std::size_t k = prod.size(); k-- > n;) {
    if (prod[k] == 0) continue;
    const Rat c = prod[k];
    for (std::size_t i = 0; i < n; ++i) prod[k - n + i] -= c * Rat(f.at(i));
    prod[k] = 0;
  }
  prod.resize(n);
  return prod;
}

// An order of Q[x]/(f) that is maximal at p, with rows of `basis` in the power basis.
struct PMaximalOrder {
  IntPoly f;
  Int p;
  RatMat basis;
  RatMat basis_inv;
  long disc_valuation = 0;  // v_p of the field discriminant

  std::size_t degree() const { return basis.size(); }

  // Coordinates of x (power basis) reduced mod p; x must be p-integral.
  std::vector<Int> coords_mod_p(const std::vector<Rat>& x) const {
    const std::size_t n = degree();
    std::vector<Int> c(n);
    for (std::size_t k = 0; k < n; ++k) {
      Rat s = 0;
      for (std::size_t i = 0; i < n; ++i) s += x[i] * basis_inv[i][k];
      s.canonicalize();
      if (mpz_divisible_p(s.get_den_mpz_t(), p.get_mpz_t())) throw std::domain_error("element is not p-integral");
      Int inv;
      mpz_invert(inv.get_mpz_t(), s.get_den_mpz_t(), p.get_mpz_t());
      c[k] = detail::mod_pos(s.get_num() * inv, p);
    }
    return c;
  }
};

namespace detail {

inline std::vector<IntMat> structure_constants(const RatMat& basis, const RatMat& binv, const IntPoly& f) {
  const std::size_t n = basis.size();
  auto to_coords = [&](const std::vector<Rat>& x) {
    std::vector<Int> c(n);
    for (std::size_t k = 0; k < n; ++k) {
      Rat s = 0;
      for (std::size_t i = 0; i < n; ++i) s += x[i] * binv[i][k];
      if (s.get_den() != 1) throw ConsistencyError("order is not closed under multiplication");
      c[k] = s.get_num();
    }
    return c;
  };
  std::vector<IntMat> table(n, IntMat(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) table[i][j] = table[j][i] = to_coords(mul_mod_monic(basis[i], basis[j], f));
  return table;
}

inline std::vector<Int> table_mul(const std::vector<IntMat>& table, const std::vector<Int>& a, const std::vector<Int>& b,
                                  const Int* p) {
  const std::size_t n = a.size();
  std::vector<Int> out(n, Int(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (b[j] == 0) continue;
      const Int ab = a[i] * b[j];
      for (std::size_t k = 0; k < n; ++k) out[k] += ab * table[i][j][k];
    }
  }
  if (p)
    for (auto& x : out) x = mod_pos(x, *p);
  return out;
}

// Matrix (columns = images of the basis) of x -> x^e on O/pO.
inline IntMat power_map_mod(const std::vector<IntMat>& table, const Int& e0, const Int& p) {
  const std::size_t n = table.size();
  IntMat cols(n, std::vector<Int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Int> base(n, Int(0)), acc;
    base[i] = 1;
    bool have = false;
    Int e = e0;
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) {
        acc = have ? table_mul(table, acc, base, &p) : base;
        have = true;
      }
      e >>= 1;
      if (e > 0) base = table_mul(table, base, base, &p);
    }
    for (std::size_t k = 0; k < n; ++k) cols[k][i] = acc[k];
  }
  return cols;
}

}  // namespace detail

inline std::size_t rank_mod(const IntMat& a, std::size_t ncols, const Int& p) {
  return ncols - kernel_mod(a, ncols, p).size();
}

// Round two: enlarge Z[x]/(f) by the multiplier ring of its p-radical until it stops growing.
inline PMaximalOrder p_maximal_order(const IntPoly& f, const Int& p) {
  if (f.lead() != 1) throw std::invalid_argument("p_maximal_order needs a monic polynomial");
  const std::size_t n = f.degree();
  PMaximalOrder O;
  O.f = f;
  O.p = p;
  O.disc_valuation = static_cast<long>(valuation(discriminant(f), p));
  O.basis.assign(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) O.basis[i][i] = 1;
  O.basis_inv = O.basis;
  Int frob_exp = p;
  while (frob_exp < Int(n)) frob_exp *= p;

  while (O.disc_valuation >= 2) {
    const auto table = detail::structure_constants(O.basis, O.basis_inv, f);

    // p-radical: kernel of x -> x^(p^j) on O/pO
    IntMat gens = kernel_mod(detail::power_map_mod(table, frob_exp, p), n, p);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Int> row(n, Int(0));
      row[i] = p;
      gens.push_back(std::move(row));
    }
    const IntMat rad = hnf_basis(gens, n);  // in O-coordinates
    RatMat rad_rat(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) rad_rat[i][k] = Rat(rad[i][k]);
    const RatMat rad_inv = inverse(rad_rat);

    // multipliers of the radical: y in O with y * I in p I
    IntMat system(n * n, std::vector<Int>(n, Int(0)));
    for (std::size_t m = 0; m < n; ++m) {
      std::vector<Int> wm(n, Int(0));
      wm[m] = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const auto prod = detail::table_mul(table, wm, rad[i], nullptr);
        for (std::size_t k = 0; k < n; ++k) {
          Rat s = 0;
          for (std::size_t l = 0; l < n; ++l) s += Rat(prod[l]) * rad_inv[l][k];
          if (s.get_den() != 1) throw ConsistencyError("p-radical is not an ideal");
          system[i * n + k][m] = s.get_num();
        }
      }
    }
    IntMat ugens = kernel_mod(system, n, p);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Int> row(n, Int(0));
      row[i] = p;
      ugens.push_back(std::move(row));
    }
    const IntMat u = hnf_basis(ugens, n);
    Int det = 1;
    for (std::size_t i = 0; i < n; ++i) det *= u[i][i];
    const long grow = static_cast<long>(n) - static_cast<long>(valuation(det, p));
    if (grow == 0) break;
    RatMat next(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (u[i][k] == 0) continue;
        for (std::size_t l = 0; l < n; ++l) next[i][l] += Rat(u[i][k]) * O.basis[k][l];
      }
    for (auto& row : next)
      for (auto& x : row) x /= p;
    O.basis = std::move(next);
    O.basis_inv = inverse(O.basis);
    O.disc_valuation -= 2 * grow;
  }
  return O;
}

inline long local_disc_valuation(const IntPoly& f, const Int& p) { return p_maximal_order(f, p).disc_valuation; }

}  // namespace weilcat
