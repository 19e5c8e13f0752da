#include <gtest/gtest.h>

#include <random>
#include <set>

#include "weilcat/exact_poly.hpp"

using namespace weilcat;

namespace {

// Sylvester matrix determinant by fraction-free elimination; independent of the subresultant code.
Int sylvester_resultant(const IntPoly& f, const IntPoly& g) {
  const int m = f.degree(), n = g.degree();
  const int N = m + n;
  std::vector<std::vector<Int>> M(N, std::vector<Int>(N, 0));
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) M[r][r + i] = f[m - i];
  for (int r = 0; r < m; ++r)
    for (int i = 0; i <= n; ++i) M[n + r][r + i] = g[n - i];
  Int prev = 1;
  int sgn_ = 1;
  for (int k = 0; k < N; ++k) {
    int piv = k;
    while (piv < N && M[piv][k] == 0) ++piv;
    if (piv == N) return 0;
    if (piv != k) {
      std::swap(M[piv], M[k]);
      sgn_ = -sgn_;
    }
    for (int i = k + 1; i < N; ++i) {
      for (int j = k + 1; j < N; ++j) {
        Int v = M[i][j] * M[k][k] - M[i][k] * M[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        M[i][j] = v;
      }
      M[i][k] = 0;
    }
    prev = M[k][k];
  }
  return sgn_ * M[N - 1][N - 1];
}

IntPoly random_poly(std::mt19937_64& rng, int deg, int lo, int hi, bool monic) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<Int> c(deg + 1);
  for (auto& v : c) v = d(rng);
  if (monic) c[deg] = 1;
  while (c[deg] == 0) c[deg] = d(rng);
  return IntPoly(std::move(c));
}

// Brute-force irreducibility for small degree: no monic divisor of degree <= d/2 within the coefficient bound.
bool brute_irreducible(const IntPoly& h) {
  const int d = h.degree();
  if (d <= 1) return true;
  Int norm2 = 0;
  for (auto& c : h.coeffs()) norm2 += c * c;
  const long B = Int(binomial(d, d / 2) * (isqrt(norm2) + 1)).get_si();
  for (int k = 1; 2 * k <= d; ++k) {
    std::vector<long> c(k, -B);
    for (;;) {
      std::vector<Int> cc(k + 1);
      for (int i = 0; i < k; ++i) cc[i] = c[i];
      cc[k] = 1;
      IntPoly cand(std::move(cc));
      if (cand[0] != 0 && exact_quotient(h, cand)) return false;
      int i = 0;
      while (i < k && c[i] == B) c[i++] = -B;
      if (i == k) break;
      ++c[i];
    }
  }
  return true;
}

}  // namespace

TEST(Resultant, KnownValues) {
  EXPECT_EQ(resultant(IntPoly{-1, 1}, IntPoly{-1, 1}), 0);
  EXPECT_EQ(resultant(IntPoly{1, 0, 1}, IntPoly{-1, 1}), 2);
  // roots 1+-i: (1+-i)^2 - 2 = -2 +- 2i, product 8
  EXPECT_EQ(resultant(IntPoly{2, -2, 1}, IntPoly{-2, 0, 1}), 8);
}

TEST(Resultant, MatchesSylvesterDeterminant) {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 300; ++it) {
    IntPoly f = random_poly(rng, 1 + it % 6, -9, 9, false);
    IntPoly g = random_poly(rng, 1 + (it / 6) % 6, -9, 9, false);
    EXPECT_EQ(resultant(f, g), sylvester_resultant(f, g)) << f << " | " << g;
  }
}

TEST(Resultant, ConventionAndMultiplicativity) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    IntPoly f = random_poly(rng, 1 + it % 6, -7, 7, true);
    IntPoly g1 = random_poly(rng, 1 + (it / 3) % 6, -7, 7, true);
    IntPoly g2 = random_poly(rng, 1 + (it / 5) % 6, -7, 7, true);
    const int sgn_ = (f.degree() * g1.degree()) % 2 ? -1 : 1;
    EXPECT_EQ(resultant(f, g1), sgn_ * resultant(g1, f));
    EXPECT_EQ(resultant(f, g1 * g2), resultant(f, g1) * resultant(f, g2));
  }
}

TEST(Resultant, ZeroPolynomialIsDomainError) {
  EXPECT_THROW(resultant(IntPoly{}, IntPoly{1, 1}), std::domain_error);
}

TEST(Discriminant, KnownValues) {
  EXPECT_EQ(discriminant(IntPoly{2, -2, 1}), -4);
  EXPECT_EQ(discriminant(IntPoly{5, 0, 1}), -20);
  EXPECT_EQ(discriminant(pow(IntPoly{8, -2, 1}, 3)), 0);
  EXPECT_THROW(discriminant(IntPoly{3}), std::domain_error);
}

TEST(Discriminant, ProductFormula) {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int it = 0; it < 200; ++it) {
    IntPoly f = random_poly(rng, 1 + it % 5, -6, 6, true);
    IntPoly g = random_poly(rng, 1 + (it / 5) % 5, -6, 6, true);
    Int r = resultant(f, g);
    if (r == 0) continue;
    ++checked;
    EXPECT_EQ(discriminant(f * g), discriminant(f) * discriminant(g) * r * r);
  }
  EXPECT_GT(checked, 150);
}

TEST(Sturm, KnownValues) {
  EXPECT_EQ(sturm_roots_in_interval(IntPoly{-2, 0, 1}, Int(-3), Int(3)), 2);
  SqrtQInt lo(0, -2, 2), hi(0, 2, 2);
  EXPECT_EQ(sturm_roots_in_interval(IntPoly{-2, 0, 1}, lo, hi), 2);
  EXPECT_EQ(sturm_roots_in_interval(IntPoly{-8, 0, 1}, lo, hi), 2);
  // half-open check of the boundary convention
  EXPECT_EQ(sturm_roots_in_interval(IntPoly{-8, 0, 1}, SqrtQInt(0, 2), hi), 1);
  EXPECT_EQ(sturm_roots_in_interval(IntPoly{5}, Int(-3), Int(3)), 0);
}

TEST(Sturm, KnownRootsOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> root(-6, 6), extra(1, 5), cnt(1, 5);
  for (int it = 0; it < 300; ++it) {
    IntPoly f = IntPoly::constant(1);
    std::set<int> roots;
    for (int k = cnt(rng); k > 0; --k) {
      int r = root(rng);
      roots.insert(r);
      f *= IntPoly{-r, 1};
    }
    if (it % 2) f *= IntPoly{extra(rng), 0, 1};  // no real roots
    int lo = -4, hi = 3;
    int inside = 0;
    for (int r : roots) inside += (r >= lo && r <= hi);
    EXPECT_EQ(sturm_roots_in_interval(f, Int(lo), Int(hi)), inside) << f;
    EXPECT_EQ(sturm_roots_in_interval(f, Int(-100), Int(100)), static_cast<int>(roots.size()));
    EXPECT_EQ(real_root_count(f), static_cast<int>(roots.size()));
  }
}

TEST(SqrtQ, ExactSignAndFolding) {
  EXPECT_EQ(SqrtQInt(3, -1, 9).u(), 0);
  EXPECT_EQ(SqrtQInt(3, -1, 9).sign(), 0);
  EXPECT_EQ(SqrtQInt(3, -1, 8).sign(), 1);   // 3 > sqrt(8)
  EXPECT_EQ(SqrtQInt(3, -1, 10).sign(), -1);  // 3 < sqrt(10)
  EXPECT_EQ(SqrtQInt(-3, 1, 10).sign(), 1);
  EXPECT_EQ(eval(IntPoly{-8, 0, 1}, SqrtQInt(0, 2, 2)).sign(), 0);
}

TEST(PowerSums, Examples) {
  auto ps = power_sums(IntPoly{2, -2, 1}, 4);
  EXPECT_EQ(ps.s, (std::vector<Int>{2, 2, 0, -4, -8}));
  EXPECT_EQ(poly_from_power_sums(PowerSums{{2, 0, 4}}, 2), (IntPoly{-2, 0, 1}));
  EXPECT_THROW(poly_from_power_sums(PowerSums{{2, 1, 0}}, 2), std::domain_error);
}

TEST(PowerSums, RoundTripRandomSextics) {
  std::mt19937_64 rng(19);
  for (int it = 0; it < 100; ++it) {
    IntPoly f = random_poly(rng, 6, -20, 20, true);
    EXPECT_EQ(poly_from_power_sums(power_sums(f, 6), 6), f);
  }
}

TEST(Factor, KnownValues) {
  auto f1 = factor_over_Z(IntPoly{4, 0, -4, 0, 1});
  ASSERT_EQ(f1.size(), 1u);
  EXPECT_EQ(f1[0].first, (IntPoly{-2, 0, 1}));
  EXPECT_EQ(f1[0].second, 2u);
  auto f2 = factor_over_Z(IntPoly{512, -384, 288, -104, 36, -6, 1});
  ASSERT_EQ(f2.size(), 1u);
  EXPECT_EQ(f2[0].first, (IntPoly{8, -2, 1}));
  EXPECT_EQ(f2[0].second, 3u);
  auto f3 = factor_over_Z(IntPoly{1, 0, -1, 0, 1});
  ASSERT_EQ(f3.size(), 1u);
  EXPECT_EQ(f3[0].second, 1u);
  std::vector<Int> big(18, 0);
  big[17] = 1;
  EXPECT_THROW(factor_over_Z(IntPoly(big)), UnsupportedDegree);
}

TEST(Factor, ExhaustiveMonicQuartics) {
  int count = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d) {
          IntPoly f{d, c, b, a, 1};
          auto fac = factor_over_Z(f);
          ASSERT_EQ(expand(fac), f) << f;
          for (auto& [h, m] : fac) {
            EXPECT_TRUE(h.is_monic());
            EXPECT_TRUE(brute_irreducible(h)) << h << " from " << f;
          }
          ++count;
        }
  EXPECT_EQ(count, 2401);
}

TEST(Factor, ProductsOfKnownFactors) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 60; ++it) {
    IntPoly f = IntPoly::constant(1);
    int k = 1 + it % 4;
    for (int i = 0; i < k; ++i) f *= random_poly(rng, 1 + (it + i) % 4, -5, 5, true);
    if (f.degree() > 16) continue;
    auto fac = factor_over_Z(f);
    EXPECT_EQ(expand(fac), f);
    unsigned total = 0;
    for (auto& [h, m] : fac) total += m;
    // at least as many irreducible factors as multiplied pieces
    EXPECT_GE(total, static_cast<unsigned>(k));
  }
}

TEST(Factor, SwinnertonDyerStyleManyModularFactors) {
  // (x^2-2)(x^2-3) type products and the irreducible x^4 - 10x^2 + 1 (splits mod every prime)
  auto fac = factor_over_Z(IntPoly{1, 0, -10, 0, 1});
  ASSERT_EQ(fac.size(), 1u);
  EXPECT_EQ(fac[0].first, (IntPoly{1, 0, -10, 0, 1}));
}

TEST(Cyclotomic, KnownValues) {
  EXPECT_EQ(cyclotomic_part(IntPoly{-1, 1} * IntPoly{3, 0, 1}), (IntPoly{-1, 1}));
  EXPECT_EQ(cyclotomic_part(IntPoly{1, 1, 1} * IntPoly{-5, 0, 1}), (IntPoly{1, 1, 1}));
}

TEST(Cyclotomic, PolynomialsAndOrders) {
  EXPECT_EQ(cyclotomic_polynomial(1), (IntPoly{-1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(12), (IntPoly{1, 0, -1, 0, 1}));
  EXPECT_EQ(cyclotomic_polynomial(15).degree(), 8);
  for (unsigned long n = 1; n <= 60; ++n) {
    IntPoly c = cyclotomic_polynomial(n);
    EXPECT_EQ(cyclotomic_part(c * IntPoly{-7, 3, 1}), c) << n;
    EXPECT_EQ(cyclotomic_orders(c * c * IntPoly{2, 0, 1}), std::vector<unsigned long>{n});
  }
}

TEST(Cyclotomic, RandomMixtures) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> pick(1, 40);
  for (int it = 0; it < 40; ++it) {
    std::set<unsigned long> ns;
    IntPoly f = IntPoly{3, 1, 0, 1} * IntPoly{5, 0, 1};  // no cyclotomic factor
    for (int k = 0; k < 3; ++k) {
      unsigned long n = pick(rng);
      ns.insert(n);
      f *= cyclotomic_polynomial(n);
    }
    IntPoly expect = IntPoly::constant(1);
    for (auto n : ns) expect *= cyclotomic_polynomial(n);
    EXPECT_EQ(cyclotomic_part(f), expect);
    EXPECT_EQ(cyclotomic_orders(f), std::vector<unsigned long>(ns.begin(), ns.end()));
  }
}

TEST(Modp, FactorizationReconstructs) {
  std::mt19937_64 rng(31);
  for (modp::u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 101ULL}) {
    for (int it = 0; it < 30; ++it) {
      IntPoly f = random_poly(rng, 1 + it % 8, 0, static_cast<int>(std::min<modp::u64>(p - 1, 50)), true);
      auto fp = modp::reduce(f, p);
      auto fac = modp::factor(fp, p, 1);
      modp::Poly prod{1};
      for (auto& [h, m] : fac)
        for (int i = 0; i < m; ++i) prod = modp::mul(prod, h, p);
      EXPECT_EQ(prod, modp::monic(fp, p));
    }
  }
}
