#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "weilcat/record.hpp"

using namespace weilcat;

namespace {

WeilPoly weil(int g, int q, const IntPoly& f) { return WeilPoly::from_poly(make_context(g, q), f); }

IntPoly power(const IntPoly& f, int k) {
  IntPoly out = IntPoly::constant(1);
  for (int i = 0; i < k; ++i) out = out * f;
  return out;
}

std::string records(int g, int q, unsigned jobs, EnumerateSummary* summary = nullptr) {
  EnumerateRequest req;
  req.g = g;
  req.q = q;
  req.jobs = jobs;
  req.block = 16;  // several flushes even for small fields
  std::ostringstream out;
  auto s = write_class_records(req, out);
  if (summary) *summary = s;
  return out.str();
}

std::vector<IsogenyClassRecord> parse_all(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl(in);
}

}  // namespace

TEST(Label, ReferenceExamples) {
  auto enc = [](int g, int q, std::vector<Int> a) { return make_label(WeilPoly::from_half(make_context(g, q), a)); };
  EXPECT_EQ(enc(2, 5, {0, -1}), "2.5.a_ab");
  EXPECT_EQ(enc(4, 5, {0, 2, 0, 43}), "4.5.a_c_a_br");
  EXPECT_EQ(parse_label("4.2.ad_c_a_b").half(), (std::vector<Int>{-3, 2, 0, 1}));
  EXPECT_EQ(parse_label("3.3.aj_bk_add").half(), (std::vector<Int>{-9, 36, -81}));
}

TEST(Label, RoundTripsRandomTuples) {
  std::mt19937_64 rng(rng_seed());
  std::uniform_int_distribution<long> coeff(-26L * 26 * 26 * 26, 26L * 26 * 26 * 26);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 10000; ++trial) {
    const int g = dim(rng);
    std::vector<Int> a;
    for (int i = 0; i < g; ++i) a.push_back(Int(coeff(rng)));
    const auto P = WeilPoly::from_half(make_context(g, 7), a);
    const auto back = parse_label(make_label(P));
    ASSERT_EQ(back, P) << make_label(P);
  }
  for (long n : {0L, 1L, 25L, 26L, 27L, 675L, 676L, 456976L, -456976L})
    EXPECT_EQ(decode_coefficient(encode_coefficient(Int(n))), Int(n));
}

TEST(Label, ErrorsReportPositions) {
  auto position = [](const std::string& text) -> long {
    try {
      parse_label(text);
    } catch (const LabelError& e) {
      return static_cast<long>(e.position);
    }
    return -1;
  };
  EXPECT_EQ(position("3.3.aj_bK_add"), 8);
  EXPECT_EQ(position("3.3.aj__add"), 7);
  EXPECT_EQ(position("3.3.aj_ab_aab"), 11);  // non-canonical leading 'a' after the sign
  EXPECT_EQ(position("3x.3.a_a_a"), 1);
  EXPECT_EQ(position("3.6.a_a_a"), 2);  // 6 is not a prime power
  EXPECT_EQ(position("2.5.a"), 4);
  EXPECT_EQ(position("2.5"), 3);
  EXPECT_EQ(position("2.5.a_ab"), -1);
}

TEST(Record, MinimalThreefoldOverF3) {
  const auto r = build_record(weil(3, 3, power(IntPoly{3, -3, 1}, 3)));
  EXPECT_EQ(r.label, "3.3.aj_bk_add");
  EXPECT_EQ(r.abvar_counts.at(0), 1);
  EXPECT_EQ(r.curve_counts.at(0), -5);
  EXPECT_NE(std::find(r.jacobian_obstruction.begin(), r.jacobian_obstruction.end(), "negative_count(1)"),
            r.jacobian_obstruction.end());
  ASSERT_EQ(r.factors.size(), 1u);
  EXPECT_EQ(r.factors[0].multiplicity, 3u);
  EXPECT_EQ(r.factors[0].e, std::optional<long>(1));
  EXPECT_EQ(r.factors[0].n, 3);
  EXPECT_TRUE(r.supersingular);
  EXPECT_FALSE(r.simple);
}

TEST(Record, SupersingularEllipticOverF2) {
  const auto r = build_record(weil(1, 2, IntPoly{2, 0, 1}));
  EXPECT_EQ(r.label, "1.2.a");
  EXPECT_TRUE(r.supersingular);
  EXPECT_EQ(r.angle_rank, 0);
  EXPECT_TRUE(r.angle_rank_stable);
  EXPECT_EQ(r.pp_status, PPStatus::yes);
  EXPECT_EQ(r.endomorphism_degree, std::optional<unsigned long>(2));
  EXPECT_EQ(r.primitive, std::optional<bool>(true));
}

TEST(Record, HypersymmetricThreefold) {
  const auto P = parse_label("3.8.ag_bk_aea");
  const auto subs = subfield_classes(3, P.context());
  const auto r = build_record(P, {0, &subs});
  ASSERT_EQ(r.factors.size(), 1u);
  EXPECT_EQ(r.factors[0].h, (std::vector<Int>{8, -2, 1}));
  EXPECT_EQ(r.factors[0].e, std::optional<long>(3));
  EXPECT_EQ(r.factors[0].n, 1);
  EXPECT_EQ(r.factors[0].brauer_invariants, (std::vector<Rat>{Rat(1, 3), Rat(2, 3)}));
  EXPECT_EQ(r.factors[0].center_disc, -28);
  EXPECT_TRUE(r.simple);
  // any model over F_2 must base change back to P
  ASSERT_TRUE(r.primitive.has_value());
  for (const auto& m : r.primitive_models) EXPECT_EQ(base_change(parse_label(m), 3), P);
  EXPECT_EQ(*r.primitive, r.primitive_models.empty());
}

TEST(Record, InvalidWeilPolynomialIsSkipped) {
  // over F_4 some Weil polynomials have a factor whose exponent does not divide its multiplicity
  EnumerateSummary s;
  const auto text = records(2, 4, 1, &s);
  std::size_t invalid = 0, valid = 0;
  for (const auto& P : enumerate_weil(2, 4)) (decompose(P).valid() ? valid : invalid) += 1;
  EXPECT_EQ(s.written, valid);
  EXPECT_EQ(s.skipped.size(), invalid);
  EXPECT_GT(invalid, 0u);
  for (const auto& why : s.skipped) EXPECT_NE(why.find("not a characteristic polynomial"), std::string::npos);
}

TEST(Record, JsonRoundTrip) {
  const auto text = records(2, 4, 1);
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto r = parse_record(line);
    EXPECT_EQ(to_jsonl(r), line);
    EXPECT_EQ(build_record(r.weil_poly(), {0, nullptr}).label, r.label);
    ++n;
  }
  EXPECT_EQ(n, 91u);
}

TEST(Record, KeysAreSortedAndUndecidedIsAString) {
  auto r = build_record(parse_label("2.2.a_ad"));
  r.geometrically_simple.reset();
  r.endomorphism_degree.reset();
  r.primitive.reset();
  const auto j = nlohmann::json::parse(to_jsonl(r));
  EXPECT_EQ(j["geometrically_simple"], "undecided");
  EXPECT_EQ(j["endomorphism_degree"], "undecided");
  EXPECT_EQ(j["primitive"], "undecided");
  EXPECT_EQ(parse_record(to_jsonl(r)), r);

  std::vector<std::string> keys;
  const std::string text = to_jsonl(r);
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_EQ(text.find("null"), std::string::npos);
  EXPECT_LT(text.find("\"abvar_counts\""), text.find("\"twist_class\""));
}

TEST(Record, ReaderRejectsBadRecords) {
  const auto good = nlohmann::json::parse(to_jsonl(build_record(parse_label("2.3.ab_c"))));
  auto expect_reject = [](nlohmann::json j) { EXPECT_THROW(record_from_json(j), RecordError) << j.dump(); };
  auto j = good;
  j["extra"] = 1;
  expect_reject(j);
  j = good;
  j.erase("angle_rank");
  expect_reject(j);
  j = good;
  j["schema_version"] = 2;
  expect_reject(j);
  j = good;
  j["coeffs"][4] = 10;  // breaks a_4 = q^2 a_0
  expect_reject(j);
  j = good;
  j["label"] = "2.3.ab_d";
  expect_reject(j);
  j = good;
  j["pp_status"] = "maybe";
  expect_reject(j);
  j = good;
  j["factors"][0]["h"] = "x";
  expect_reject(j);
  j = good;
  j["factors"][0]["surplus"] = true;
  expect_reject(j);
  j = good;
  j["abvar_counts"][0] = 5;  // counts are decimal strings
  expect_reject(j);
  EXPECT_THROW(parse_record("{not json"), RecordError);
  EXPECT_NO_THROW(record_from_json(good));
}

TEST(Record, OutputIndependentOfJobCountAndRepeatable) {
  const auto serial = records(2, 5, 1);
  EXPECT_EQ(records(2, 5, 3), serial);
  EXPECT_EQ(records(2, 5, 1), serial);
  EXPECT_EQ(records(3, 2, 2), records(3, 2, 1));
}

TEST(Record, CanonicalOrderFollowsEnumeration) {
  const auto recs = parse_all(records(2, 3, 2));
  std::vector<std::string> want;
  for (const auto& P : enumerate_weil(2, 3))
    if (decompose(P).valid()) want.push_back(make_label(P));
  std::vector<std::string> got;
  for (const auto& r : recs) got.push_back(r.label);
  EXPECT_EQ(got, want);
}

TEST(Record, FiltersSelectSubsets) {
  EnumerateRequest req;
  req.g = 2;
  req.q = 3;
  req.simple_only = true;
  std::ostringstream simple;
  write_class_records(req, simple);
  req.simple_only = false;
  req.ordinary_only = true;
  std::ostringstream ordinary;
  write_class_records(req, ordinary);
  std::size_t n_simple = 0, n_ordinary = 0;
  for (const auto& r : parse_all(records(2, 3, 1))) {
    n_simple += r.simple;
    n_ordinary += r.ordinary;
  }
  const auto s = parse_all(simple.str()), o = parse_all(ordinary.str());
  EXPECT_EQ(s.size(), n_simple);
  EXPECT_EQ(o.size(), n_ordinary);
  for (const auto& r : s) EXPECT_TRUE(r.simple);
  for (const auto& r : o) EXPECT_TRUE(r.ordinary);
}

TEST(Record, TwistIdsMatchExactPartition) {
  for (int q : {2, 3, 4}) {
    const auto recs = parse_all(records(2, q, 1));
    std::vector<WeilPoly> classes;
    for (const auto& r : recs) classes.push_back(r.weil_poly());
    for (const auto& part : twist_classes(classes)) {
      for (auto i : part) EXPECT_EQ(recs[i].twist_class, recs[part.front()].twist_class);
    }
    // distinct parts get distinct ids
    std::set<std::string> ids;
    for (const auto& part : twist_classes(classes)) ids.insert(recs[part.front()].twist_class);
    EXPECT_EQ(ids.size(), twist_classes(classes).size());
  }
}

TEST(Record, PrimitivityOverF4) {
  const auto recs = parse_all(records(2, 4, 1));
  std::size_t imprimitive = 0;
  for (const auto& r : recs) {
    ASSERT_TRUE(r.primitive.has_value());
    if (*r.primitive) continue;
    ++imprimitive;
    ASSERT_FALSE(r.primitive_models.empty());
    for (const auto& m : r.primitive_models) EXPECT_EQ(base_change(parse_label(m), 2), r.weil_poly()) << r.label;
  }
  // imprimitive classes are exactly the images of F_2 classes; distinct sources may share an image
  std::set<std::string> images;
  for (const auto& P : enumerate_weil(2, 2))
    if (decompose(P).valid()) images.insert(make_label(base_change(P, 2)));
  EXPECT_EQ(imprimitive, images.size());
}
