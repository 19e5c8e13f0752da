#pragma once

#include <stdexcept>
#include <vector>

#include "weilcat/poly.hpp"

namespace weilcat {

struct PowerSums {
  std::vector<Int> s;  // s[0] = degree of the source polynomial
  friend bool operator==(const PowerSums&, const PowerSums&) = default;
};

// Newton power sums s_0..s_n of the roots of a monic polynomial.
inline PowerSums power_sums(const IntPoly& f, std::size_t n) {
  if (!f.is_monic()) throw std::domain_error("power_sums needs a monic polynomial");
  const std::size_t d = static_cast<std::size_t>(f.degree());
  PowerSums out;
  out.s.assign(n + 1, Int(0));
  out.s[0] = static_cast<unsigned long>(d);
  for (std::size_t k = 1; k <= n; ++k) {
    Int acc = 0;
    if (k <= d) acc = f[d - k] * static_cast<unsigned long>(k);
    for (std::size_t i = 1; i < k && i <= d; ++i) mpz_addmul(acc.get_mpz_t(), f[d - i].get_mpz_t(), out.s[k - i].get_mpz_t());
    out.s[k] = -acc;
  }
  return out;
}

// Monic polynomial with rational coefficients (lowest first) from s_1..s_d.
inline std::vector<Rat> rational_poly_from_power_sums(const std::vector<Rat>& s, std::size_t d) {
  if (s.size() < d + 1) throw std::invalid_argument("not enough power sums");
  std::vector<Rat> c(d + 1);
  c[d] = 1;
  for (std::size_t k = 1; k <= d; ++k) {
    Rat acc = s[k];
    for (std::size_t i = 1; i < k; ++i) acc += c[d - i] * s[k - i];
    c[d - k] = -acc / static_cast<long>(k);
  }
  return c;
}

// Inverse of power_sums; throws when the reconstructed coefficients are not integers.
inline IntPoly poly_from_power_sums(const PowerSums& ps, std::size_t d) {
  std::vector<Rat> s(ps.s.begin(), ps.s.end());
  auto c = rational_poly_from_power_sums(s, d);
  std::vector<Int> out;
  out.reserve(c.size());
  for (auto& v : c) {
    if (v.get_den() != 1) throw std::domain_error("power sums do not come from an integer polynomial");
    out.push_back(v.get_num());
  }
  return IntPoly(std::move(out));
}

}  // namespace weilcat
