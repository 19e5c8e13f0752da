#pragma once

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weilcat/bigint.hpp"

namespace weilcat {

// Dense univariate polynomial over Z, coefficients stored lowest degree first.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Int> c) : c_(std::move(c)) { trim(); }
  IntPoly(std::initializer_list<long> c) {
    c_.reserve(c.size());
    for (long v : c) c_.emplace_back(v);
    trim();
  }

  static IntPoly constant(const Int& v) { return IntPoly(std::vector<Int>{v}); }
  static IntPoly monomial(const Int& v, std::size_t k) {
    std::vector<Int> c(k + 1);
    c[k] = v;
    return IntPoly(std::move(c));
  }
  static IntPoly x() { return monomial(1, 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  const Int& lead() const {
    if (c_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
    return c_.back();
  }
  const std::vector<Int>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }

  Int operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Int(0); }
  const Int& at(std::size_t i) const { return c_.at(i); }

  void set(std::size_t i, const Int& v) {
    if (i >= c_.size()) c_.resize(i + 1);
    c_[i] = v;
    trim();
  }

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const IntPoly& a, const IntPoly& b) { return !(a == b); }
  // Graded lexicographic order; only used to get canonical orderings.
  friend bool operator<(const IntPoly& a, const IntPoly& b) {
    if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
    for (std::size_t i = a.c_.size(); i-- > 0;)
      if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
    return false;
  }

  IntPoly& operator+=(const IntPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  IntPoly& operator-=(const IntPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  IntPoly& operator*=(const Int& s) {
    if (s == 0) {
      c_.clear();
      return *this;
    }
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator-(IntPoly a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend IntPoly operator*(IntPoly a, const Int& s) { return a *= s; }
  friend IntPoly operator*(const Int& s, IntPoly a) { return a *= s; }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Int> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) mpz_addmul(r[i + j].get_mpz_t(), a.c_[i].get_mpz_t(), b.c_[j].get_mpz_t());
    }
    return IntPoly(std::move(r));
  }
  IntPoly& operator*=(const IntPoly& o) { return *this = *this * o; }

  // Divides every coefficient by s; throws if some division is inexact.
  IntPoly exact_div(const Int& s) const {
    IntPoly r = *this;
    for (auto& v : r.c_) {
      if (!mpz_divisible_p(v.get_mpz_t(), s.get_mpz_t())) throw std::domain_error("inexact scalar division");
      mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), s.get_mpz_t());
    }
    return r;
  }

  template <class T>
  T eval(const T& x) const {
    T acc(0);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + T(c_[i]);
    return acc;
  }
  Int operator()(const Int& x) const {
    Int acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }
  double eval_double(double x) const {
    double acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i].get_d();
    return acc;
  }

  IntPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Int> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<unsigned long>(i);
    return IntPoly(std::move(r));
  }

  // f(-x)
  IntPoly negate_var() const {
    IntPoly r = *this;
    for (std::size_t i = 1; i < r.c_.size(); i += 2) r.c_[i] = -r.c_[i];
    return r;
  }
  // f(s*x)
  IntPoly scale_var(const Int& s) const {
    IntPoly r = *this;
    Int pw = 1;
    for (auto& v : r.c_) {
      v *= pw;
      pw *= s;
    }
    r.trim();
    return r;
  }
  // f(x + s) by repeated synthetic division.
  IntPoly shift(const Int& s) const {
    std::vector<Int> r = c_;
    const std::size_t n = r.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = n - 1; j-- > i;) r[j] += s * r[j + 1];
    return IntPoly(std::move(r));
  }
  // x^deg f(1/x)
  IntPoly reversed() const {
    std::vector<Int> r(c_.rbegin(), c_.rend());
    return IntPoly(std::move(r));
  }
  // f(x^k)
  IntPoly inflate(std::size_t k) const {
    if (c_.empty()) return {};
    std::vector<Int> r((c_.size() - 1) * k + 1);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i * k] = c_[i];
    return IntPoly(std::move(r));
  }
  IntPoly compose(const IntPoly& g) const {
    IntPoly acc;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * g + IntPoly::constant(c_[i]);
    return acc;
  }

  Int content() const {
    Int g = 0;
    for (const auto& v : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    return g;
  }
  // Primitive part with positive leading coefficient.
  IntPoly primitive_part() const {
    if (c_.empty()) return {};
    Int g = content();
    if (c_.back() < 0) g = -g;
    return exact_div(g);
  }

  std::string to_string(char var = 'T') const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
      const Int& v = c_[i];
      if (v == 0) continue;
      Int mag = abs(v);
      if (first) {
        if (v < 0) os << "-";
      } else {
        os << (v < 0 ? " - " : " + ");
      }
      first = false;
      if (i == 0 || mag != 1) os << mag.get_str();
      if (i >= 1) os << var;
      if (i >= 2) os << "^" << i;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const IntPoly& f) { return os << f.to_string(); }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Int> c_;
};

inline IntPoly pow(IntPoly base, unsigned e) {
  IntPoly r = IntPoly::constant(1);
  while (e) {
    if (e & 1) r *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return r;
}

// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a = q*b + r.
inline IntPoly pseudo_rem(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw std::domain_error("pseudo-remainder by zero polynomial");
  if (a.degree() < b.degree()) return a;
  std::vector<Int> r = a.coeffs();
  const int db = b.degree();
  const Int& lb = b.lead();
  int e = a.degree() - db + 1;
  for (int dr = a.degree(); dr >= db; --dr) {
    Int t = r[dr];
    for (auto& v : r) v *= lb;
    if (t != 0) {
      for (int j = 0; j <= db; ++j) mpz_submul(r[dr - db + j].get_mpz_t(), t.get_mpz_t(), b.at(j).get_mpz_t());
    }
    r.pop_back();
    --e;
  }
  IntPoly out(std::move(r));
  if (e > 0) out *= ipow(lb, e);
  return out;
}

// Exact quotient over Z; nullopt when b does not divide a in Z[x].
inline std::optional<IntPoly> exact_quotient(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  if (a.is_zero()) return IntPoly{};
  if (a.degree() < b.degree()) return std::nullopt;
  std::vector<Int> r = a.coeffs();
  const int db = b.degree();
  std::vector<Int> q(a.degree() - db + 1);
  const Int& lb = b.lead();
  for (int i = a.degree(); i >= db; --i) {
    if (r[i] == 0) continue;
    if (!mpz_divisible_p(r[i].get_mpz_t(), lb.get_mpz_t())) return std::nullopt;
    Int t;
    mpz_divexact(t.get_mpz_t(), r[i].get_mpz_t(), lb.get_mpz_t());
    q[i - db] = t;
    for (int j = 0; j <= db; ++j) mpz_submul(r[i - db + j].get_mpz_t(), t.get_mpz_t(), b.at(j).get_mpz_t());
  }
  for (int i = 0; i < db; ++i)
    if (r[i] != 0) return std::nullopt;
  return IntPoly(std::move(q));
}

inline IntPoly divide_exact(const IntPoly& a, const IntPoly& b) {
  auto q = exact_quotient(a, b);
  if (!q) throw std::domain_error("polynomial division is not exact");
  return *q;
}

// Division by a monic polynomial: a = q*b + r.
inline std::pair<IntPoly, IntPoly> divmod_monic(const IntPoly& a, const IntPoly& b) {
  if (!b.is_monic()) throw std::domain_error("divmod_monic needs a monic divisor");
  if (a.degree() < b.degree()) return {IntPoly{}, a};
  std::vector<Int> r = a.coeffs();
  const int db = b.degree();
  std::vector<Int> q(a.degree() - db + 1);
  for (int i = a.degree(); i >= db; --i) {
    if (r[i] == 0) continue;
    Int t = r[i];
    q[i - db] = t;
    for (int j = 0; j <= db; ++j) mpz_submul(r[i - db + j].get_mpz_t(), t.get_mpz_t(), b.at(j).get_mpz_t());
  }
  r.resize(db);
  return {IntPoly(std::move(q)), IntPoly(std::move(r))};
}

// Greatest common divisor over Z via the subresultant sequence; primitive with positive leading coefficient.
inline IntPoly gcd(IntPoly a, IntPoly b) {
  if (a.is_zero()) return b.primitive_part() * b.content();
  if (b.is_zero()) return a.primitive_part() * a.content();
  if (a.degree() < b.degree()) std::swap(a, b);
  Int d = weilcat::gcd(a.content(), b.content());
  a = a.primitive_part();
  b = b.primitive_part();
  Int g = 1, h = 1;
  for (;;) {
    int delta = a.degree() - b.degree();
    IntPoly r = pseudo_rem(a, b);
    if (r.is_zero()) return b.primitive_part() * d;
    if (r.degree() == 0) return IntPoly::constant(d);
    a = std::move(b);
    b = r.exact_div(g * ipow(h, delta));
    g = a.lead();
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      Int hd = ipow(h, delta - 1);
      h = ipow(g, delta);
      mpz_divexact(h.get_mpz_t(), h.get_mpz_t(), hd.get_mpz_t());
    }
  }
}

// Squarefree part (primitive, positive leading coefficient).
inline IntPoly squarefree_part(const IntPoly& f) {
  if (f.degree() <= 0) return IntPoly::constant(1);
  IntPoly pf = f.primitive_part();
  IntPoly g = gcd(pf, pf.derivative());
  return divide_exact(pf, g).primitive_part();
}

// Musser's squarefree decomposition of a primitive polynomial: f = prod f_i^i up to sign/content.
inline std::vector<std::pair<IntPoly, unsigned>> squarefree_decomposition(const IntPoly& f) {
  std::vector<std::pair<IntPoly, unsigned>> out;
  if (f.degree() <= 0) return out;
  IntPoly pf = f.primitive_part();
  IntPoly c = gcd(pf, pf.derivative());
  IntPoly w = divide_exact(pf, c).primitive_part();
  unsigned i = 1;
  while (c.degree() > 0) {
    IntPoly y = gcd(w, c);
    IntPoly z = divide_exact(w, y).primitive_part();
    if (z.degree() > 0) out.emplace_back(z, i);
    ++i;
    w = y;
    c = divide_exact(c, y).primitive_part();
  }
  if (w.degree() > 0) out.emplace_back(w, i);
  return out;
}

inline IntPoly parse_poly_list(const std::string& text) {
  std::vector<Int> c;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    auto b = tok.find_first_not_of(" \t[]");
    auto e = tok.find_last_not_of(" \t[]");
    if (b == std::string::npos) throw std::invalid_argument("empty coefficient in '" + text + "'");
    Int v;
    if (v.set_str(tok.substr(b, e - b + 1), 10) != 0) throw std::invalid_argument("bad coefficient '" + tok + "'");
    c.push_back(v);
  }
  return IntPoly(std::move(c));
}

}  // namespace weilcat
