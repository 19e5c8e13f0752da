#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "weilcat/angle_rank.hpp"
#include "weilcat/extensions.hpp"
#include "weilcat/honda_tate.hpp"
#include "weilcat/label.hpp"
#include "weilcat/newton.hpp"
#include "weilcat/polarization.hpp"
#include "weilcat/stats.hpp"

namespace weilcat {

inline constexpr int kSchemaVersion = 1;
inline const std::string kUndecided = "undecided";

using SubfieldClasses = std::map<unsigned, std::vector<WeilPoly>>;

// A Weil polynomial that is not the characteristic polynomial of an isogeny class, or whose status is undecided.
struct SkippedClass : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad record text or a record that contradicts its own coefficients.
struct RecordError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FactorRecord {
  std::vector<Int> h;  // lowest degree first
  unsigned multiplicity = 1;
  std::optional<long> e;
  long n = 0;
  std::vector<Rat> brauer_invariants;
  Int center_disc;

  friend bool operator==(const FactorRecord&, const FactorRecord&) = default;
};

struct IsogenyClassRecord {
  std::string label;
  int g = 0;
  Int q, p;
  std::vector<Int> coeffs;  // a_0..a_{2g}, a_i the coefficient of T^{2g-i}
  std::vector<Rat> slopes;
  int p_rank = 0;
  bool ordinary = false, almost_ordinary = false, supersingular = false;
  long newton_elevation = 0;
  bool simple = false;
  std::optional<bool> geometrically_simple;
  std::vector<FactorRecord> factors;
  std::vector<Int> abvar_counts, curve_counts;  // r = 1..R
  std::vector<std::string> jacobian_obstruction;
  PPStatus pp_status = PPStatus::unknown;
  PPRule pp_rule = PPRule::none;
  int angle_rank = 0;
  bool angle_rank_numerical = true, angle_rank_stable = false;
  std::optional<bool> primitive;
  std::vector<std::string> primitive_models;
  std::string twist_class;
  std::optional<unsigned long> endomorphism_degree;
  double normalized_poly_rd = 0;

  friend bool operator==(const IsogenyClassRecord&, const IsogenyClassRecord&) = default;

  WeilPoly weil_poly() const {
    if (coeffs.size() != static_cast<std::size_t>(2 * g + 1)) throw RecordError(label + ": expected 2g+1 coefficients");
    const auto P = WeilPoly::from_half(make_context(g, q), std::vector<Int>(coeffs.begin() + 1, coeffs.begin() + 1 + g));
    if (P.a_all() != coeffs) throw RecordError(label + ": coefficients violate the functional equation");
    if (make_label(P) != label) throw RecordError(label + ": label does not match the coefficients");
    return P;
  }
};

struct RecordOptions {
  int horizon = 0;  // 0: default_horizon(g)
  const SubfieldClasses* subfields = nullptr;
};

// Set-independent twist class id: hash of P_N mod a large prime, N the universal twist degree.
inline std::string twist_class_id(const WeilPoly& P) {
  static std::mutex lock;
  static std::map<int, Int> degrees;
  Int N;
  {
    std::lock_guard guard(lock);
    auto it = degrees.find(P.g());
    if (it == degrees.end()) it = degrees.emplace(P.g(), universal_twist_degree(P.g())).first;
    N = it->second;
  }
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the fingerprint words
  for (auto w : twist_fingerprint(P, N))
    for (int b = 0; b < 8; ++b) {
      h ^= (w >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  std::ostringstream s;
  s << P.g() << '.' << P.q().get_str() << '.' << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

inline IsogenyClassRecord build_record(const WeilPoly& P, const RecordOptions& opt = {}) {
  const Decomposition d = decompose(P);
  if (d.status == HTStatus::invalid) throw SkippedClass(make_label(P) + ": Weil polynomial is not a characteristic polynomial");
  if (d.status == HTStatus::undecided) throw SkippedClass(make_label(P) + ": Honda-Tate exponent undecided");

  IsogenyClassRecord r;
  const auto& ctx = P.context();
  r.label = make_label(P);
  r.g = P.g();
  r.q = ctx.q;
  r.p = ctx.p;
  r.coeffs = P.a_all();

  const auto N = newton_polygon(P);
  r.slopes = N.slopes();
  r.p_rank = N.p_rank();
  r.ordinary = N.is_ordinary();
  r.almost_ordinary = N.is_almost_ordinary();
  r.supersingular = N.is_supersingular();
  r.newton_elevation = elevation(N);

  r.simple = is_simple(d);
  r.geometrically_simple = is_geometrically_simple(P);
  for (const auto& f : d.factors)
    r.factors.push_back({f.h.coeffs(), f.multiplicity, f.e, f.n, f.invariants(), f.center_disc});

  const int R = opt.horizon > 0 ? opt.horizon : default_horizon(P.g());
  r.abvar_counts = abvar_counts(P, R);
  r.curve_counts = curve_counts(P, R);
  for (const auto& o : jacobian_obstructions(P, R)) r.jacobian_obstruction.push_back(o.describe());

  const auto pp = is_principally_polarizable(P, d);
  r.pp_status = pp.status;
  r.pp_rule = pp.rule;

  const auto ar = angle_rank(P);
  r.angle_rank = ar.delta;
  r.angle_rank_numerical = ar.numerical;
  r.angle_rank_stable = ar.certified_stable;

  if (ctx.a == 1) {
    r.primitive = true;
  } else if (opt.subfields) {
    const auto prim = is_primitive(P, *opt.subfields);
    r.primitive = prim.primitive;
    for (const auto& m : prim.models) r.primitive_models.push_back(make_label(m));
  }
  r.twist_class = twist_class_id(P);
  r.endomorphism_degree = endomorphism_degree(P);
  r.normalized_poly_rd = normalized_poly_root_discriminant(P);
  return r;
}

// ---------------------------------------------------------------- JSON

namespace detail {

using json = nlohmann::json;

inline json small_int(const Int& v) {
  if (!v.fits_slong_p()) throw RecordError("coefficient " + v.get_str() + " does not fit a JSON integer");
  return v.get_si();
}

inline Int read_small_int(const json& j) {
  if (!j.is_number_integer()) throw RecordError("expected an integer, got " + j.dump());
  return Int(static_cast<long>(j.get<std::int64_t>()));
}

inline Int read_big_int(const json& j) {
  if (!j.is_string()) throw RecordError("expected a decimal string, got " + j.dump());
  Int v;
  if (v.set_str(j.get<std::string>(), 10) != 0) throw RecordError("bad integer string " + j.dump());
  return v;
}

inline Rat read_fraction(const json& j) {
  if (!j.is_string()) throw RecordError("expected a fraction string, got " + j.dump());
  Rat v;
  if (v.set_str(j.get<std::string>(), 10) != 0) throw RecordError("bad fraction " + j.dump());
  v.canonicalize();
  return v;
}

template <class T, class F>
json undecided_or(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(kUndecided);
}

template <class T, class F>
std::optional<T> read_undecided_or(const json& j, F&& f) {
  if (j.is_string() && j.get<std::string>() == kUndecided) return std::nullopt;
  return f(j);
}

inline void require_keys(const json& j, const std::set<std::string>& keys, const std::string& what) {
  if (!j.is_object()) throw RecordError(what + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw RecordError("unknown field '" + k + "' in " + what);
  for (const auto& k : keys)
    if (!j.contains(k)) throw RecordError("missing field '" + k + "' in " + what);
}

template <class E>
E enum_from(const std::string& s, std::initializer_list<E> values) {
  for (E v : values)
    if (to_string(v) == s) return v;
  throw RecordError("unknown value '" + s + "'");
}

inline bool read_bool(const json& j) {
  if (!j.is_boolean()) throw RecordError("expected a boolean, got " + j.dump());
  return j.get<bool>();
}

inline long read_long(const json& j) { return read_small_int(j).get_si(); }

}  // namespace detail

inline nlohmann::json to_json(const IsogenyClassRecord& r) {
  using detail::json;
  auto ints = [](const std::vector<Int>& v, bool big) {
    json a = json::array();
    for (const auto& x : v) a.push_back(big ? json(x.get_str()) : detail::small_int(x));
    return a;
  };
  auto fractions = [](const std::vector<Rat>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
  };
  json factors = json::array();
  for (const auto& f : r.factors)
    factors.push_back({{"h", ints(f.h, false)},
                       {"multiplicity", f.multiplicity},
                       {"e", detail::undecided_or(f.e, [](long e) { return json(e); })},
                       {"n", f.n},
                       {"brauer_invariants", fractions(f.brauer_invariants)},
                       {"center_disc", f.center_disc.get_str()}});
  return json{
      {"schema_version", kSchemaVersion},
      {"label", r.label},
      {"g", r.g},
      {"q", detail::small_int(r.q)},
      {"p", detail::small_int(r.p)},
      {"coeffs", ints(r.coeffs, false)},
      {"slopes", fractions(r.slopes)},
      {"p_rank", r.p_rank},
      {"ordinary", r.ordinary},
      {"almost_ordinary", r.almost_ordinary},
      {"supersingular", r.supersingular},
      {"newton_elevation", r.newton_elevation},
      {"simple", r.simple},
      {"geometrically_simple", detail::undecided_or(r.geometrically_simple, [](bool b) { return json(b); })},
      {"factors", factors},
      {"abvar_counts", ints(r.abvar_counts, true)},
      {"curve_counts", ints(r.curve_counts, true)},
      {"jacobian_obstruction", r.jacobian_obstruction},
      {"pp_status", to_string(r.pp_status)},
      {"pp_rule", to_string(r.pp_rule)},
      {"angle_rank", r.angle_rank},
      {"angle_rank_numerical", r.angle_rank_numerical},
      {"angle_rank_stable", r.angle_rank_stable},
      {"primitive", detail::undecided_or(r.primitive, [](bool b) { return json(b); })},
      {"primitive_models", r.primitive_models},
      {"twist_class", r.twist_class},
      {"endomorphism_degree", detail::undecided_or(r.endomorphism_degree, [](unsigned long m) { return json(m); })},
      {"normalized_poly_rd", r.normalized_poly_rd},
  };
}

// One line, keys sorted (nlohmann::json keeps objects ordered by key).
inline std::string to_jsonl(const IsogenyClassRecord& r) { return to_json(r).dump(); }

// Strict reader: unknown or missing fields, wrong types and self-inconsistent coefficients are errors.
inline IsogenyClassRecord record_from_json(const nlohmann::json& j) {
  using namespace detail;
  require_keys(j,
               {"schema_version", "label", "g", "q", "p", "coeffs", "slopes", "p_rank", "ordinary", "almost_ordinary",
                "supersingular", "newton_elevation", "simple", "geometrically_simple", "factors", "abvar_counts",
                "curve_counts", "jacobian_obstruction", "pp_status", "pp_rule", "angle_rank", "angle_rank_numerical",
                "angle_rank_stable", "primitive", "primitive_models", "twist_class", "endomorphism_degree",
                "normalized_poly_rd"},
               "record");
  if (j["schema_version"] != kSchemaVersion) throw RecordError("unsupported schema_version " + j["schema_version"].dump());
  auto strings = [](const json& a) {
    if (!a.is_array()) throw RecordError("expected an array, got " + a.dump());
    std::vector<std::string> out;
    for (const auto& x : a) {
      if (!x.is_string()) throw RecordError("expected a string, got " + x.dump());
      out.push_back(x.get<std::string>());
    }
    return out;
  };
  auto array = [](const json& a, auto&& read) {
    if (!a.is_array()) throw RecordError("expected an array, got " + a.dump());
    std::vector<decltype(read(a))> out;
    for (const auto& x : a) out.push_back(read(x));
    return out;
  };
  IsogenyClassRecord r;
  if (!j["label"].is_string()) throw RecordError("label must be a string");
  r.label = j["label"].get<std::string>();
  r.g = static_cast<int>(read_long(j["g"]));
  r.q = read_small_int(j["q"]);
  r.p = read_small_int(j["p"]);
  r.coeffs = array(j["coeffs"], read_small_int);
  r.slopes = array(j["slopes"], read_fraction);
  r.p_rank = static_cast<int>(read_long(j["p_rank"]));
  r.ordinary = read_bool(j["ordinary"]);
  r.almost_ordinary = read_bool(j["almost_ordinary"]);
  r.supersingular = read_bool(j["supersingular"]);
  r.newton_elevation = read_long(j["newton_elevation"]);
  r.simple = read_bool(j["simple"]);
  r.geometrically_simple = read_undecided_or<bool>(j["geometrically_simple"], read_bool);
  if (!j["factors"].is_array()) throw RecordError("factors must be an array");
  for (const auto& f : j["factors"]) {
    require_keys(f, {"h", "multiplicity", "e", "n", "brauer_invariants", "center_disc"}, "factor");
    FactorRecord fr;
    fr.h = array(f["h"], read_small_int);
    fr.multiplicity = static_cast<unsigned>(read_long(f["multiplicity"]));
    fr.e = read_undecided_or<long>(f["e"], read_long);
    fr.n = read_long(f["n"]);
    fr.brauer_invariants = array(f["brauer_invariants"], read_fraction);
    fr.center_disc = read_big_int(f["center_disc"]);
    r.factors.push_back(std::move(fr));
  }
  r.abvar_counts = array(j["abvar_counts"], read_big_int);
  r.curve_counts = array(j["curve_counts"], read_big_int);
  r.jacobian_obstruction = strings(j["jacobian_obstruction"]);
  if (!j["pp_status"].is_string() || !j["pp_rule"].is_string()) throw RecordError("pp fields must be strings");
  r.pp_status = enum_from(j["pp_status"].get<std::string>(), {PPStatus::yes, PPStatus::no, PPStatus::unknown});
  r.pp_rule = enum_from(j["pp_rule"].get<std::string>(),
                        {PPRule::g1, PPRule::g2_howe, PPRule::odd_g_simple, PPRule::totally_real, PPRule::ordinary_norm,
                         PPRule::cm_ramified, PPRule::cm_inert, PPRule::all_factors_pp, PPRule::none});
  r.angle_rank = static_cast<int>(read_long(j["angle_rank"]));
  r.angle_rank_numerical = read_bool(j["angle_rank_numerical"]);
  r.angle_rank_stable = read_bool(j["angle_rank_stable"]);
  r.primitive = read_undecided_or<bool>(j["primitive"], read_bool);
  r.primitive_models = strings(j["primitive_models"]);
  if (!j["twist_class"].is_string()) throw RecordError("twist_class must be a string");
  r.twist_class = j["twist_class"].get<std::string>();
  r.endomorphism_degree = read_undecided_or<unsigned long>(
      j["endomorphism_degree"], [](const json& x) { return static_cast<unsigned long>(read_long(x)); });
  if (!j["normalized_poly_rd"].is_number()) throw RecordError("normalized_poly_rd must be a number");
  r.normalized_poly_rd = j["normalized_poly_rd"].get<double>();

  // the symmetric half and the label must agree with a_0..a_g
  const WeilPoly P = r.weil_poly();
  if (r.p != P.context().p) throw RecordError(r.label + ": p does not match q");
  return r;
}

inline IsogenyClassRecord parse_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw RecordError(std::string("malformed JSON: ") + e.what());
  }
  return record_from_json(j);
}

inline std::vector<IsogenyClassRecord> read_jsonl(std::istream& in) {
  std::vector<IsogenyClassRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const RecordError& e) {
      throw RecordError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------- ordered parallel writer

struct EnumerateRequest {
  int g = 1;
  Int q = 2;
  bool simple_only = false;
  bool ordinary_only = false;
  unsigned jobs = 1;
  int horizon = 0;
  std::size_t block = 1024;  // records built in parallel before the ordered flush
};

struct EnumerateSummary {
  std::size_t written = 0;
  std::vector<std::string> skipped;  // reasons, in canonical order
};

// Records for every valid class of (g, q) in canonical enumeration order, one JSON object per line.
// Output bytes do not depend on `jobs`.
inline EnumerateSummary write_class_records(const EnumerateRequest& req, std::ostream& out) {
  const WeilContext ctx = make_context(req.g, req.q);
  const SubfieldClasses subfields = ctx.a > 1 ? subfield_classes(req.g, ctx) : SubfieldClasses{};
  const RecordOptions ropt{req.horizon, &subfields};
  const unsigned jobs = std::max(1u, req.jobs);

  EnumerateOptions eopt;
  eopt.jobs = jobs;
  if (req.ordinary_only) eopt.filter = [](const WeilPoly& P) { return newton_polygon(P).is_ordinary(); };
  const auto classes = enumerate_weil(ctx, eopt);

  EnumerateSummary summary;
  struct Slot {
    std::string line, skipped;
  };
  for (std::size_t start = 0; start < classes.size(); start += req.block) {
    const std::size_t stop = std::min(classes.size(), start + req.block);
    std::vector<Slot> slots(stop - start);
    std::vector<std::exception_ptr> errors(jobs);
    auto work = [&](unsigned w) {
      try {
        for (std::size_t i = start + w; i < stop; i += jobs) {
          try {
            const auto rec = build_record(classes[i], ropt);
            if (req.simple_only && !rec.simple) continue;
            slots[i - start].line = to_jsonl(rec);
          } catch (const SkippedClass& e) {
            slots[i - start].skipped = e.what();
          }
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (auto& s : slots) {
      if (!s.line.empty()) {
        out << s.line << '\n';
        ++summary.written;
      } else if (!s.skipped.empty()) {
        summary.skipped.push_back(std::move(s.skipped));
      }
    }
  }
  return summary;
}

}  // namespace weilcat
