#include <gtest/gtest.h>

#include "weilcat/label.hpp"
#include "weilcat/polarization.hpp"

using namespace weilcat;

namespace {

// Howe's surface condition restated from scratch: a_1^2 - a_2 = q, a_2 < 0, all primes of a_2 are 1 mod 3.
bool surface_condition(long a1, long a2, long q) {
  if (a1 * a1 - a2 != q || a2 >= 0) return false;
  long n = -a2;
  for (long l = 2; l * l <= n; ++l) {
    if (n % l) continue;
    if (l % 3 != 1) return false;
    while (n % l == 0) n /= l;
  }
  return n == 1 || n % 3 == 1;
}

std::vector<WeilPoly> valid_classes(int g, int q) {
  std::vector<WeilPoly> out;
  for (auto& P : enumerate_weil(g, q))
    if (decompose(P).valid()) out.push_back(P);
  return out;
}

}  // namespace

TEST(Polarization, ReferenceVerdicts) {
  EXPECT_EQ(is_principally_polarizable(parse_label("2.5.ac_ab")), (PPVerdict{PPStatus::no, PPRule::g2_howe}));
  EXPECT_EQ(is_principally_polarizable(parse_label("2.2.a_ad")), (PPVerdict{PPStatus::yes, PPRule::g2_howe}));
  EXPECT_EQ(is_principally_polarizable(parse_label("4.5.ag_o_au_bj")), (PPVerdict{}));
  for (int q : {2, 3, 4, 5, 7, 8, 9})
    for (const auto& P : valid_classes(1, q))
      EXPECT_EQ(is_principally_polarizable(P), (PPVerdict{PPStatus::yes, PPRule::g1}));
}

TEST(Polarization, UnknownCarriesNoRule) {
  auto v = is_principally_polarizable(parse_label("4.5.ag_o_au_bj"));
  EXPECT_EQ(v.status, PPStatus::unknown);
  EXPECT_EQ(v.rule, PPRule::none);
  EXPECT_TRUE(is_simple(parse_label("4.5.ag_o_au_bj")));
  EXPECT_FALSE(newton_polygon(parse_label("4.5.ag_o_au_bj")).is_ordinary());
}

TEST(Polarization, SurfaceNoVerdictsAreExactlyHowesCondition) {
  for (int q = 2; q <= 5; ++q) {
    for (const auto& P : valid_classes(2, q)) {
      auto v = is_principally_polarizable(P);
      ASSERT_NE(v.status, PPStatus::unknown) << P.poly();
      EXPECT_EQ(v.status == PPStatus::no, surface_condition(P.a(1).get_si(), P.a(2).get_si(), q)) << P.poly();
    }
  }
}

TEST(Orders, KnownFieldDiscriminants) {
  struct Case {
    IntPoly f;
    long p;
    long v;
  };
  const std::vector<Case> cases = {
      {IntPoly{1, 1, 1}, 3, 1},           {IntPoly{3, 0, 1}, 2, 0},          {IntPoly{3, 0, 1}, 3, 1},
      {IntPoly{-5, 0, 1}, 2, 0},          {IntPoly{-3, 0, 1}, 2, 2},         {IntPoly{1, 0, 0, 0, 1}, 2, 8},
      {IntPoly{-2, 0, 0, 1}, 2, 2},       {IntPoly{-2, 0, 0, 1}, 3, 3},      {IntPoly{-18, 0, 1}, 2, 3},
      {IntPoly{-18, 0, 1}, 3, 0},         {IntPoly{1, 0, 0, 1, 0, 0, 1}, 3, 9},
      // Dedekind's cubic: 2 divides the index of every monogenic order, field discriminant -503
      {IntPoly{-8, -2, -1, 1}, 2, 0},     {IntPoly{-8, -2, -1, 1}, 503, 1},
      // 2 zeta_5 generates Q(zeta_5), discriminant 5^3
      {IntPoly{16, 8, 4, 2, 1}, 2, 0},    {IntPoly{16, 8, 4, 2, 1}, 5, 3},
  };
  for (const auto& c : cases) EXPECT_EQ(local_disc_valuation(c.f, c.p), c.v) << c.f << " at " << c.p;
}

TEST(Polarization, OrdinaryVerdictAgreesWithHoweOnSimpleSurfaces) {
  long compared = 0, by_ramification = 0, no = 0;
  for (int q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19}) {
    for (const auto& P : valid_classes(2, q)) {
      if (!is_simple(P) || !newton_polygon(P).is_ordinary()) continue;
      const auto v = ordinary_simple_verdict(P);
      EXPECT_EQ(v.status == PPStatus::yes, !surface_condition(P.a(1).get_si(), P.a(2).get_si(), q)) << P.poly();
      by_ramification += v.rule == PPRule::cm_ramified;
      no += v.status == PPStatus::no;
      ++compared;
    }
  }
  EXPECT_GT(compared, 1000);
  EXPECT_GT(by_ramification, 0);
  EXPECT_GT(no, 0);
}

TEST(Polarization, SingleIsomorphismClassSurface) {
  // 2.2.b_b has a unique abelian variety up to isomorphism, and it carries a principal polarization
  auto P = parse_label("2.2.b_b");
  EXPECT_EQ(P.poly(), (IntPoly{4, 2, 1, 1, 1}));
  EXPECT_TRUE(newton_polygon(P).is_ordinary());
  EXPECT_EQ(cm_norm(P.poly(), 2), 17);
  EXPECT_EQ(ordinary_simple_verdict(P).status, PPStatus::yes);
}

TEST(Polarization, NonSquareNormMeansRamified) {
  long nonsquare = 0;
  for (auto [g, q] : {std::pair{2, 3}, std::pair{2, 5}, std::pair{3, 2}, std::pair{4, 2}}) {
    for (const auto& P : valid_classes(g, q)) {
      if (!is_simple(P) || !newton_polygon(P).is_ordinary()) continue;
      if (is_square(cm_norm(P.poly(), P.q()))) continue;
      EXPECT_TRUE(cm_ramified(P.poly(), P.q())) << P.poly();
      ++nonsquare;
    }
  }
  EXPECT_GT(nonsquare, 0);
}

TEST(Polarization, OddSimpleClassesAreYes) {
  for (int q = 2; q <= 5; ++q)
    for (const auto& P : valid_classes(3, q))
      if (is_simple(P)) {
        EXPECT_EQ(is_principally_polarizable(P).status, PPStatus::yes) << P.poly();
      }
}

TEST(Polarization, ThreefoldUnknownsComeFromNonPPFactors) {
  for (int q = 2; q <= 5; ++q) {
    for (const auto& P : valid_classes(3, q)) {
      auto d = decompose(P);
      auto v = is_principally_polarizable(P, d);
      if (v.status == PPStatus::yes) {
        EXPECT_NE(v.rule, PPRule::none);
        continue;
      }
      ASSERT_EQ(v.status, PPStatus::unknown) << P.poly();
      ASSERT_FALSE(is_simple(d));
      bool has_no = false;
      for (const auto& f : d.factors) has_no = has_no || factor_verdict(f, P.q()).status == PPStatus::no;
      EXPECT_TRUE(has_no) << P.poly();
    }
  }
}

TEST(Polarization, ProductWithNonPPSurfaceFactorIsUnknown) {
  auto S = parse_label("2.5.ac_ab");
  auto E = parse_label("1.5.a");
  auto P = WeilPoly::from_poly(make_context(3, 5), S.poly() * E.poly());
  EXPECT_EQ(is_principally_polarizable(P), (PPVerdict{}));
}

TEST(Polarization, RamificationChecks) {
  // imaginary quadratic fields over Q are always ramified somewhere
  for (int q : {2, 3, 4, 5, 7, 9})
    for (const auto& P : valid_classes(1, q))
      if (P.a(1) % prime_power(q)->p != 0) {
        EXPECT_TRUE(cm_ramified(P.poly(), q)) << P.poly();
      }
  // this fourfold: K/K+ unramified and no prime of K+ above pi - q/pi is inert
  const auto h = parse_label("4.5.ag_o_au_bj").poly();
  EXPECT_FALSE(cm_ramified(h, 5));
  EXPECT_FALSE(cm_nonsplit_divisor(h, 5));
  // its field discriminant is 2^8 5^4 41^2
  EXPECT_EQ(local_disc_valuation(h, 2), 8);
  EXPECT_EQ(local_disc_valuation(h, 5), 4);
  EXPECT_EQ(local_disc_valuation(h, 41), 2);
  EXPECT_TRUE(cm_ramified(parse_label("2.2.b_b").poly(), 2));
}
