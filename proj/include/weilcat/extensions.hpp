#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "weilcat/honda_tate.hpp"
#include "weilcat/newton.hpp"

namespace weilcat {

inline int default_horizon(int g) { return std::max(2 * g, 10); }

// #A(F_{q^r}) = prod (1 - alpha_i^r) = Res(P, T^r - 1); checked against the base change at T = 1 for r <= 4.
inline Int abvar_count(const WeilPoly& P, unsigned long r) {
  if (r == 0) throw std::invalid_argument("extension degree must be positive");
  Int n = resultant(P.poly(), IntPoly::monomial(1, r) - IntPoly::constant(1));
  if (r <= 4 && n != base_change_poly(P.poly(), r)(Int(1)))
    throw ConsistencyError("point count methods disagree");
  return n;
}

inline std::vector<Int> abvar_counts(const WeilPoly& P, int R) {
  std::vector<Int> out;
  for (int r = 1; r <= R; ++r) out.push_back(abvar_count(P, r));
  return out;
}

// c_1..c_R with L(T) / ((1 - T)(1 - qT)) = exp(sum c_n T^n / n), via T Z'(T) / Z(T) in exact rationals.
inline std::vector<Int> curve_counts(const WeilPoly& P, int R) {
  // Z = L / ((1 - T)(1 - qT)) as a power series to order R
  const IntPoly L = P.lpoly();
  std::vector<Rat> Z(R + 1, Rat(0));
  {
    std::vector<Rat> geom(R + 1);  // 1 / ((1 - T)(1 - qT)) = sum (q^{k+1} - 1)/(q - 1) T^k
    Int qk = 1, acc = 0;
    for (int k = 0; k <= R; ++k) {
      acc += qk;
      geom[k] = Rat(acc);
      qk *= P.q();
    }
    for (int i = 0; i <= R; ++i)
      for (int j = 0; i + j <= R; ++j)
        if (static_cast<std::size_t>(i) < L.size()) Z[i + j] += Rat(L.at(i)) * geom[j];
  }
  // T Z' = C Z with C = sum c_n T^n
  std::vector<Rat> C(R + 1, Rat(0));
  for (int n = 1; n <= R; ++n) {
    Rat acc = Rat(n) * Z[n];
    for (int k = 1; k < n; ++k) acc -= C[k] * Z[n - k];
    C[n] = acc / Z[0];
  }
  std::vector<Int> out;
  auto ps = power_sums(P.poly(), R);
  Int qn = 1;
  for (int n = 1; n <= R; ++n) {
    qn *= P.q();
    C[n].canonicalize();
    if (C[n].get_den() != 1) throw ConsistencyError("non-integral virtual curve count");
    if (C[n].get_num() != qn + 1 - ps.s[n]) throw ConsistencyError("curve count series disagrees with power sums");
    out.push_back(C[n].get_num());
  }
  return out;
}

struct JacobianObstruction {
  enum class Kind { negative_count, monotonicity, ihara } kind;
  int r = 0;  // extension degree, or n for monotonicity
  int m = 0;  // multiplier for monotonicity (c_{mn} < c_n)

  std::string describe() const {
    switch (kind) {
      case Kind::negative_count: return "negative_count(" + std::to_string(r) + ")";
      case Kind::monotonicity: return "monotonicity(" + std::to_string(m) + "," + std::to_string(r) + ")";
      case Kind::ihara: return "ihara(" + std::to_string(r) + ")";
    }
    return {};
  }
};

// Genus-g Ihara bound over F_Q: N <= Q + 1 + (sqrt((8Q + 1) g^2 + 4 (Q^2 - Q) g) - g) / 2.
inline bool violates_ihara(const Int& N, const Int& Q, int g) {
  const Int X = N - Q - 1;
  const Int lhs = 2 * X + g;
  if (lhs <= 0) return false;
  return lhs * lhs > (8 * Q + 1) * g * g + 4 * (Q * Q - Q) * g;
}

// The form printed without the genus term, (sqrt(8q + 1) - 1) / 2 above q + 1; logged, never used to obstruct.
inline bool violates_ihara_footnote_form(const Int& N, const Int& Q) {
  const Int lhs = 2 * (N - Q - 1) + 1;
  if (lhs <= 0) return false;
  return lhs * lhs > 8 * Q + 1;
}

inline std::vector<JacobianObstruction> jacobian_obstructions(const WeilPoly& P, int R) {
  std::vector<JacobianObstruction> out;
  auto c = curve_counts(P, R);
  using K = JacobianObstruction::Kind;
  for (int r = 1; r <= R; ++r)
    if (c[r - 1] < 0) out.push_back({K::negative_count, r, 0});
  for (int n = 1; n <= R; ++n)
    for (int m = 2; m * n <= R; ++m)
      if (c[m * n - 1] < c[n - 1]) out.push_back({K::monotonicity, n, m});
  for (int r = 1; r <= R; ++r)
    if (violates_ihara(c[r - 1], ipow(P.q(), r), P.g())) out.push_back({K::ihara, r, 0});
  return out;
}

// ceil((sqrt q - 1)^2)^g <= #A(F_q) <= floor((sqrt q + 1)^2)^g
inline std::pair<Int, Int> weil_count_bounds(int g, const Int& q) {
  const Int t = isqrt(4 * q);
  return {ipow(q + 1 - t, g), ipow(q + 1 + t, g)};
}

struct PrimitivityResult {
  bool primitive = true;
  std::vector<WeilPoly> models;  // classes over proper subfields that base change to P
};

// subfield_classes[d] lists the classes over F_{p^d} for proper divisors d of a.
inline PrimitivityResult is_primitive(const WeilPoly& P, const std::map<unsigned, std::vector<WeilPoly>>& subfield_classes) {
  PrimitivityResult res;
  const unsigned a = P.context().a;
  for (const auto& [d, classes] : subfield_classes) {
    if (d == 0 || d >= a || a % d != 0) continue;
    for (const auto& Pp : classes) {
      if (Pp.g() != P.g() || Pp.context().p != P.context().p || Pp.context().a != d) continue;
      if (base_change_poly(Pp.poly(), a / d) == P.poly()) res.models.push_back(Pp);
    }
  }
  res.primitive = res.models.empty();
  return res;
}

// Every class over F_{p^d}, d | a proper, ready for is_primitive.
inline std::map<unsigned, std::vector<WeilPoly>> subfield_classes(int g, const WeilContext& ctx) {
  std::map<unsigned, std::vector<WeilPoly>> out;
  for (unsigned d = 1; d < ctx.a; ++d) {
    if (ctx.a % d) continue;
    auto sub = make_context(g, ipow(ctx.p, d));
    for (auto& P : enumerate_weil(sub))
      if (decompose(P).valid()) out[d].push_back(P);
  }
  return out;
}

// Every twist degree divides N = lcm{ r : phi(r) <= 4 g^2 }, so twists are exactly the pairs with P_N = Q_N.
inline Int universal_twist_degree(int g) {
  Int N = 1;
  for (unsigned long r : orders_with_phi_at_most(4ul * g * g)) N = lcm(N, Int(r));
  return N;
}

// P_N reduced mod the Mersenne prime 2^61 - 1: char poly of C^N for the companion matrix C.
inline std::vector<modp::u64> twist_fingerprint(const WeilPoly& P, const Int& N) {
  using modp::u64;
  const u64 ell = (u64{1} << 61) - 1;
  const std::size_t n = 2 * P.g();
  using Mat = std::vector<std::vector<u64>>;
  auto mul = [&](const Mat& A, const Mat& B) {
    Mat C(n, std::vector<u64>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (!A[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) C[i][j] = modp::addm(C[i][j], modp::mulm(A[i][k], B[k][j], ell), ell);
      }
    return C;
  };
  const auto red = modp::reduce(P.poly(), ell);
  Mat comp(n, std::vector<u64>(n, 0));
  for (std::size_t i = 1; i < n; ++i) comp[i][i - 1] = 1;
  for (std::size_t i = 0; i < n; ++i) comp[i][n - 1] = modp::subm(0, i < red.size() ? red[i] : 0, ell);
  Mat acc(n, std::vector<u64>(n, 0));
  for (std::size_t i = 0; i < n; ++i) acc[i][i] = 1;
  Mat base = comp;
  for (std::size_t bit = 0; bit < mpz_sizeinbase(N.get_mpz_t(), 2); ++bit) {
    if (mpz_tstbit(N.get_mpz_t(), bit)) acc = mul(acc, base);
    base = mul(base, base);
  }
  // traces of powers, then Newton's identities mod ell
  std::vector<u64> ps(n + 1, 0), e(n + 1, 0);
  Mat pw = acc;
  for (std::size_t k = 1; k <= n; ++k) {
    u64 tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr = modp::addm(tr, pw[i][i], ell);
    ps[k] = tr;
    if (k < n) pw = mul(pw, acc);
  }
  e[0] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    u64 s = 0;
    for (std::size_t i = 1; i <= k; ++i) {
      u64 t = modp::mulm(e[k - i], ps[i], ell);
      s = (i % 2) ? modp::addm(s, t, ell) : modp::subm(s, t, ell);
    }
    e[k] = modp::mulm(s, modp::invm(k, ell), ell);
  }
  return e;
}

using TwistKey = std::pair<std::vector<Rat>, std::vector<modp::u64>>;

// Partition into twist classes: bucket by (slopes, fingerprint of P_N), then confirm pairs exactly.
inline std::vector<std::vector<std::size_t>> twist_classes(const std::vector<WeilPoly>& classes) {
  std::vector<std::size_t> parent(classes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<int, Int> universal;
  std::map<TwistKey, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const int g = classes[i].g();
    if (!universal.count(g)) universal[g] = universal_twist_degree(g);
    buckets[{newton_polygon(classes[i]).slopes(), twist_fingerprint(classes[i], universal[g])}].push_back(i);
  }
  for (const auto& [key, idx] : buckets) {
    for (std::size_t b = 1; b < idx.size(); ++b) {
      // a fingerprint collision between non-twists would surface here
      if (!are_twists(classes[idx[0]], classes[idx[b]])) throw ConsistencyError("twist fingerprint collision");
      parent[find(idx[b])] = find(idx[0]);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < classes.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace weilcat
