#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weilcat {

using Int = mpz_class;
using Rat = mpq_class;

// Raised when a cross-check between two independent computations disagrees.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

inline Int ipow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative integer");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_square(const Int& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline bool is_prime(const Int& n) {
  return n >= 2 && mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline int sign(const Int& n) { return sgn(n); }

// p-adic valuation of a nonzero integer.
inline unsigned long valuation(const Int& n, const Int& p) {
  if (n == 0) throw std::domain_error("valuation of zero");
  Int t = n;
  return mpz_remove(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
}

struct PrimePower {
  Int p;
  unsigned a = 0;
};

// Returns (p, a) with q = p^a, or nullopt if q is not a prime power.
inline std::optional<PrimePower> prime_power(const Int& q) {
  if (q < 2) return std::nullopt;
  for (unsigned a = static_cast<unsigned>(mpz_sizeinbase(q.get_mpz_t(), 2)); a >= 1; --a) {
    Int root;
    if (mpz_root(root.get_mpz_t(), q.get_mpz_t(), a) != 0 && is_prime(root)) return PrimePower{root, a};
  }
  return std::nullopt;
}

// Distinct prime factors by trial division; fine for the small integers we feed it.
inline std::vector<Int> prime_divisors(Int n) {
  std::vector<Int> out;
  if (n < 0) n = -n;
  if (n < 2) return out;
  for (Int d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline Int euler_phi(const Int& n) {
  Int r = n;
  for (const auto& p : prime_divisors(n)) r = r / p * (p - 1);
  return r;
}

inline long to_long(const Int& n) {
  if (!n.fits_slong_p()) throw std::overflow_error("integer does not fit in long: " + n.get_str());
  return n.get_si();
}

inline Int rat_num(const Rat& r) { return r.get_num(); }
inline Int rat_den(const Rat& r) { return r.get_den(); }

inline Int binomial(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

inline Int factorial(unsigned long n) {
  Int r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

// Seed for every randomized routine. Read once; WEILCAT_SEED overrides the default.
inline std::uint64_t rng_seed() {
  static const std::uint64_t seed = [] {
    if (const char* env = std::getenv("WEILCAT_SEED"); env && *env) return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    return std::uint64_t{0x5eed2019};
  }();
  return seed;
}

}  // namespace weilcat
