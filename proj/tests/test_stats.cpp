#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "weilcat/angle_rank.hpp"
#include "weilcat/label.hpp"
#include "weilcat/stats.hpp"

using namespace weilcat;

namespace {

std::vector<WeilPoly> valid_classes(int g, int q) {
  std::vector<WeilPoly> out;
  for (auto& P : enumerate_weil(g, q))
    if (decompose(P).valid()) out.push_back(P);
  return out;
}

// Selberg integral with alpha = beta = 1, gamma = 1/2 on [0,1]^n, rescaled to the mean of |V| over [-2,2]^n.
double mean_abs_vandermonde(int n) {
  double s = 1;
  for (int j = 0; j < n; ++j)
    s *= std::tgamma(1 + j / 2.0) * std::tgamma(1 + j / 2.0) * std::tgamma(1 + (j + 1) / 2.0) /
         (std::tgamma(2 + (n + j - 1) / 2.0) * std::tgamma(1.5));
  return s * std::pow(4.0, n * (n - 1) / 2.0);
}

MonteCarloOptions mc(std::uint64_t samples) {
  MonteCarloOptions o;
  o.samples = samples;
  return o;
}

}  // namespace

TEST(Volume, ReferencePredictions) {
  EXPECT_EQ(std::llround(dipippo_howe_volume(3, 25).total), 355556);
  EXPECT_EQ(std::llround(dipippo_howe_volume(4, 5).total), 130032);
  EXPECT_EQ(std::llround(dipippo_howe_volume(5, 3).total), 256194);
  EXPECT_EQ(std::llround(dipippo_howe_volume(6, 2).total), 144724);
  EXPECT_EQ(std::llround(dipippo_howe_volume(3, 25).ordinary), 284444);
  EXPECT_EQ(std::llround(dipippo_howe_volume(4, 5).ordinary), 104025);
  EXPECT_EQ(std::llround(dipippo_howe_volume(5, 3).ordinary), 170796);
  EXPECT_EQ(std::llround(dipippo_howe_volume(6, 2).ordinary), 72362);
  EXPECT_EQ(dipippo_howe_volume(1, 4).total, 8);
  EXPECT_EQ(dipippo_howe_constant(3), Rat(1024, 45));
  EXPECT_EQ(dipippo_howe_constant(4), Rat(65536, 1575));
}

TEST(Density, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(sato_tate_density(2, 0), 3.0 / 8);
  EXPECT_DOUBLE_EQ(sato_tate_density(1, 1.5), 0.25);
  EXPECT_DOUBLE_EQ(sato_tate_density(1, 2.5), 0);
  for (int g = 1; g <= 4; ++g) {
    const auto& m = density_model(g);
    EXPECT_EQ(m.exact_moment(0), Rat(1)) << g;
    for (double x : {0.3, 1.7, 2.0 * g - 0.1, 2.0 * g + 0.5}) EXPECT_DOUBLE_EQ(m(x), m(-x));
    EXPECT_EQ(m(2.0 * g + 0.01), 0);
    EXPECT_NEAR(m.cdf(0), 0.5, 1e-15);
    EXPECT_NEAR(m.cdf(2.0 * g - 1e-9), 1, 1e-9);
  }
}

TEST(Density, PiecesAreContinuousAndOuterPieceIsAPower) {
  for (int g = 2; g <= 4; ++g) {
    const auto model = DensityModel::closed_form(g);
    const auto& pieces = model.pieces();
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      Rat left = 0, right = 0;
      for (std::size_t k = pieces[i].coeffs.size(); k-- > 0;) left = left * pieces[i].hi + pieces[i].coeffs[k];
      for (std::size_t k = pieces[i + 1].coeffs.size(); k-- > 0;) right = right * pieces[i].hi + pieces[i + 1].coeffs[k];
      EXPECT_EQ(left.get_str(), right.get_str()) << g;
    }
    // outer piece: c (2g - x)^{(g-1)(g+2)/2}
    const auto& outer = pieces.back().coeffs;
    const int n = (g - 1) * (g + 2) / 2;
    ASSERT_EQ(static_cast<int>(outer.size()), n + 1);
    const Rat c = outer.back() * ((n % 2) ? Rat(-1) : Rat(1));
    for (int k = 0; k <= n; ++k) {
      Rat expect = c * Rat(binomial(n, k)) * Rat(ipow(Int(2 * g), n - k));
      if (k % 2) expect = -expect;
      EXPECT_EQ(outer[k].get_str(), expect.get_str()) << g << " " << k;
    }
  }
}

TEST(Density, ExactMomentsMatchSimplexIntegrals) {
  // moments of r_1 + ... + r_g under Vandermonde weight on the ordered simplex, by exact iterated integration
  const std::map<int, std::vector<Rat>> simplex = {
      {1, {Rat(4, 3), Rat(16, 5), Rat(64, 7)}},
      {2, {Rat(8, 5), Rat(256, 35), Rat(1024, 21)}},
      {3, {Rat(12, 7), Rat(304, 35), Rat(2368, 33)}},
      {4, {Rat(16, 9), Rat(2176, 231), Rat(22528, 273)}},
  };
  for (const auto& [g, moments] : simplex)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(density_model(g).exact_moment(2 * (i + 1)), moments[i]) << g;
  for (int g = 1; g <= 4; ++g) EXPECT_EQ(density_model(g).exact_moment(3), 0);
}

TEST(Density, ReferenceMoments) {
  const double g3[] = {1.7142, 8.6857, 71.7575, 796.1318, 10750.4655, 166954.5839};
  const double g4[] = {1.7777, 9.4199, 82.5201, 1001.4566, 15384.2906, 282674.8553};
  for (int i = 0; i < 6; ++i) {
    // reference values carry four decimals
    EXPECT_NEAR(density_moment(3, 2 * (i + 1)).value, g3[i], 1e-3 * std::max(1.0, g3[i] * 1e-4)) << i;
    EXPECT_NEAR(density_moment(4, 2 * (i + 1)).value, g4[i], 1e-3 * std::max(1.0, g4[i] * 1e-4)) << i;
  }
  EXPECT_TRUE(density_moment(3, 2).exact);
  EXPECT_NEAR(density_moment(1, 2).value, 4.0 / 3, 1e-15);
}

TEST(Density, GaussianRelation) {
  EXPECT_NEAR(gaussian_moment_prediction(1.8461, 4), 10.2243, 1e-2);
  EXPECT_NEAR(gaussian_moment_prediction(1.8461, 6), 94.375, 1e-2);
  EXPECT_DOUBLE_EQ(gaussian_moment_prediction(2, 4), 12);
  EXPECT_DOUBLE_EQ(gaussian_moment_prediction(2, 2), 2);
  EXPECT_THROW(gaussian_moment_prediction(2, 3), std::invalid_argument);
}

TEST(MonteCarlo, AgreesWithClosedForm) {
  const auto sim = DensityModel::monte_carlo(3, mc(2'000'000));
  const auto& exact = density_model(3);
  for (int r : {2, 4, 6}) {
    auto m = sim.moment(r);
    EXPECT_LT(std::fabs(m.value - exact.moment(r).value), 4 * m.std_error + 1e-12) << r;
    EXPECT_GT(m.std_error, 0);
  }
  double worst = 0;
  for (double x = -6; x <= 6; x += 0.05) worst = std::max(worst, std::fabs(sim.cdf(x) - exact.cdf(x)));
  EXPECT_LT(worst, 5e-3);
  for (double x : {0.0, 1.0, 2.5, 4.0}) EXPECT_NEAR(sim(x), exact(x), 0.01) << x;
}

TEST(MonteCarlo, HigherGenusMomentsAndNormalization) {
  // exact simplex moments for g = 5 and 6, as above
  const std::map<int, std::vector<Rat>> exact = {{5, {Rat(20, 11), Rat(4240, 429), Rat(89280, 1001)}},
                                                 {6, {Rat(24, 13), Rat(7296, 715)}}};
  for (const auto& [g, moments] : exact) {
    const auto sim = DensityModel::monte_carlo(g, mc(2'000'000));
    for (std::size_t i = 0; i < moments.size(); ++i) {
      auto m = sim.moment(2 * static_cast<int>(i + 1));
      EXPECT_LT(std::fabs(m.value - moments[i].get_d()), 4 * m.std_error) << g << " " << i;
    }
    const auto w = sim.mean_weight();
    EXPECT_LT(std::fabs(w.value - mean_abs_vandermonde(g)), 3 * w.std_error) << g;
    EXPECT_NEAR(sim.cdf(2.0 * g), 1, 1e-12);
  }
  // reference g = 6 second moment
  EXPECT_NEAR(Rat(24, 13).get_d(), 1.8461, 1e-4);
}

TEST(MonteCarlo, SeededAndThreadIndependent) {
  MonteCarloOptions a = mc(600'000), b = a;
  b.threads = 3;
  const auto x = DensityModel::monte_carlo(5, a), y = DensityModel::monte_carlo(5, b);
  EXPECT_EQ(x.moment(2).value, y.moment(2).value);
  EXPECT_EQ(x.cdf(1.0), y.cdf(1.0));
}

TEST(ErrorDistribution, EllipticOverF2) {
  const auto classes = valid_classes(1, 2);
  ASSERT_EQ(classes.size(), 5u);
  auto d = empirical_error_distribution(classes, density_model(1));
  std::sort(d.values.begin(), d.values.end());
  // #A = 3 + a_1, E = (#A - 2) / sqrt 2
  const double r = std::sqrt(2.0);
  const std::vector<double> expect = {-1 / r, 0, 1 / r, r, 3 / r};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(d.values[i], expect[i], 1e-15);
  EXPECT_EQ(d.histogram.total(), 5);
}

TEST(ErrorDistribution, SupportBound) {
  for (auto [g, q] : {std::pair{1, 7}, std::pair{2, 5}, std::pair{3, 3}}) {
    // |#A - q^g| <= (sqrt q + 1)^{2g} - q^g
    const double bound = (std::pow(std::sqrt(q) + 1, 2 * g) - std::pow(q, g)) / std::pow(q, g - 0.5);
    for (const auto& P : valid_classes(g, q)) EXPECT_LE(std::fabs(normalized_error(P)), bound + 1e-12);
  }
}

TEST(ErrorDistribution, SurfacesOverF211) {
  const auto classes = valid_classes(2, 211);
  auto d = empirical_error_distribution(classes, density_model(2));
  EXPECT_LT(d.ks, 0.05);
}

TEST(Extremes, ThreefoldsOverF3) {
  auto e = extremes(valid_classes(3, 3));
  EXPECT_EQ(e.min_count, 1);
  EXPECT_EQ(e.max_count, 343);
  ASSERT_EQ(e.minimal.size(), 1u);
  ASSERT_EQ(e.maximal.size(), 1u);
  EXPECT_EQ(make_label(e.minimal[0]), "3.3.aj_bk_add");
  EXPECT_EQ(make_label(e.maximal[0]), "3.3.j_bk_dd");
  EXPECT_TRUE(e.twisted_pair);
  EXPECT_TRUE(are_twists(e.minimal[0], e.maximal[0]));
}

TEST(Extremes, ThreefoldsOverF2) {
  auto e = extremes(valid_classes(3, 2));
  EXPECT_EQ(e.minimal.size(), 7u);
  EXPECT_EQ(e.maximal.size(), 1u);
  EXPECT_FALSE(e.twisted_pair);
}

TEST(Extremes, SimpleThreefoldsOverF5) {
  auto e = simple_extremes(valid_classes(3, 5));
  EXPECT_EQ(e.max_count, 631);
  EXPECT_EQ(e.min_count, 25);
  ASSERT_EQ(e.maximal.size(), 1u);
  ASSERT_EQ(e.minimal.size(), 1u);
  EXPECT_EQ(e.maximal[0].poly(), (IntPoly{125, 200, 170, 93, 34, 8, 1}));
  EXPECT_EQ(e.minimal[0].poly(), (IntPoly{125, -200, 160, -85, 32, -8, 1}));
  EXPECT_FALSE(e.twisted_pair);
}

TEST(Fits, EllipticCurves) {
  std::vector<std::pair<double, double>> pts;
  for (int q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27})
    pts.emplace_back(q, static_cast<double>(valid_classes(1, q).size()));
  auto f = loglog_fit(pts);
  EXPECT_NEAR(f.a, 0.4971, 0.05);
  EXPECT_NEAR(f.b, 1.3717, 0.05);
  auto p = predicted_fit(1);
  EXPECT_DOUBLE_EQ(p.a, 0.5);
  EXPECT_NEAR(p.b, 1.3863, 1e-4);
  EXPECT_NEAR(predicted_fit(3).b, 3.1248, 1e-4);
}

TEST(Fits, ExactLine) {
  auto f = loglog_fit({{2, 8}, {4, 32}, {8, 128}});
  EXPECT_NEAR(f.a, 2, 1e-12);
  EXPECT_NEAR(f.b, std::log(2.0), 1e-12);
  EXPECT_NEAR(f.residual, 0, 1e-12);
}

TEST(Strata, ThreefoldRatios) {
  auto polys = eligible_polygons(3);
  std::sort(polys.begin(), polys.end(), [](const auto& a, const auto& b) { return polygon_lt(a, b); });
  ASSERT_EQ(polys.size(), 5u);
  for (std::size_t i = 0; i + 1 < polys.size(); ++i) ASSERT_TRUE(polygon_lt(polys[i], polys[i + 1]));
  for (int q : {2, 3, 4, 5, 7}) {
    const auto classes = valid_classes(3, q);
    double prev = 0;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const double r = newton_stratum_ratio(classes, polys[i]);
      if (i == 0) {
        EXPECT_EQ(r, 0);
      }
      EXPECT_LE(r, prev + 1e-12);
      prev = r;
    }
    EXPECT_GT(prev, -4) << q;
  }
}

TEST(Strata, PrankCoverageBySimpleClasses) {
  for (int g = 1; g <= 3; ++g)
    for (int q : {2, 3, 4, 5}) {
      auto cov = prank_coverage(valid_classes(g, q));
      ASSERT_EQ(cov.size(), static_cast<std::size_t>(g + 1));
      for (int f = 0; f <= g; ++f) EXPECT_TRUE(cov[f]) << g << " " << q << " " << f;
    }
  auto cov = prank_coverage(valid_classes(4, 2));
  for (bool c : cov) EXPECT_TRUE(c);
}

TEST(Strata, AngleRankExclusionsMatchReference) {
  // excluded p-ranks for simple classes over the whole database; our subsets can only exclude more
  const std::map<int, std::vector<std::set<int>>> reference = {
      {1, {{1}, {0}}},
      {2, {{1, 2}, {0, 1}, {0}}},
      {3, {{1, 2, 3}, {1, 2}, {0, 1, 3}, {}}},
  };
  for (const auto& [g, table] : reference) {
    std::vector<std::pair<int, int>> pairs;
    for (int q : {2, 3, 4, 5})
      for (const auto& P : valid_classes(g, q))
        if (is_simple(P)) pairs.emplace_back(angle_rank(P).delta, newton_polygon(P).p_rank());
    const auto ours = rank_prank_exclusions(g, pairs);
    for (int d = 0; d <= g; ++d)
      for (int f : table[d]) EXPECT_TRUE(ours[d].count(f)) << "g=" << g << " delta=" << d << " p-rank " << f;
  }
  // g = 2, q <= 5: angle rank 1 simple classes are all ordinary
  std::vector<std::pair<int, int>> surf;
  for (int q : {2, 3, 4, 5})
    for (const auto& P : valid_classes(2, q))
      if (is_simple(P)) surf.emplace_back(angle_rank(P).delta, newton_polygon(P).p_rank());
  EXPECT_EQ(rank_prank_exclusions(2, surf)[1], (std::set<int>{0, 1}));
}

TEST(Discriminants, IdentityAndNormalization) {
  long checked = 0;
  for (int g = 1; g <= 3; ++g)
    for (int q : {2, 3, 4, 5, 7, 8, 9}) {
      for (const auto& P : enumerate_weil(g, q)) {
        ASSERT_TRUE(discriminant_identity_holds(P)) << P.poly();
        const double rd = normalized_poly_root_discriminant(P);
        EXPECT_GE(rd, 0);
        EXPECT_LE(rd, 1 + 1e-12) << P.poly();
        ++checked;
      }
    }
  EXPECT_GT(checked, 10000);
  // g = 1: Disc = a_1^2 - 4q, so 1.2.a has |Disc|^{1/2} / (2 sqrt 2) = 1
  EXPECT_NEAR(normalized_poly_root_discriminant(parse_label("1.2.a")), 1, 1e-12);
  auto h = disc_histogram(valid_classes(2, 3), 10);
  EXPECT_EQ(h.total(), static_cast<long>(valid_classes(2, 3).size()));
}

TEST(Output, CsvAndPlotScripts) {
  auto d = empirical_error_distribution(valid_classes(2, 7), density_model(2), 16);
  std::ostringstream csv;
  histogram_csv(d.histogram, &density_model(2)).write(csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.rfind("center,count,empirical_density,model_density\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);
  const auto plt = gnuplot_script("histogram", "errors.csv", "g=2 q=7");
  EXPECT_NE(plt.find("plot 'errors.csv'"), std::string::npos);
  EXPECT_THROW(gnuplot_script("pie", "x.csv", ""), std::invalid_argument);
}
