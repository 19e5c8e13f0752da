#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "weilcat/bigint.hpp"
#include "weilcat/poly.hpp"

namespace weilcat {

// u + v*sqrt(q) with exact sign. When q is a perfect square v is folded into u.
class SqrtQInt {
 public:
  SqrtQInt() = default;
  SqrtQInt(Int u, Int v, Int q) : u_(std::move(u)), v_(std::move(v)), q_(std::move(q)) { normalize(); }
  // An integer living in Z[sqrt(q)].
  SqrtQInt(Int u, const Int& q) : u_(std::move(u)), v_(0), q_(q) { normalize(); }

  static SqrtQInt sqrt_q(const Int& q, const Int& mult = 1) { return SqrtQInt(0, mult, q); }

  const Int& u() const { return u_; }
  const Int& v() const { return v_; }
  const Int& q() const { return q_; }

  int sign() const {
    const int su = sgn(u_), sv = sgn(v_);
    if (sv == 0) return su;
    if (su == 0) return sv;
    if (su == sv) return su;
    // opposite signs: compare u^2 with v^2 q
    Int lhs = u_ * u_;
    Int rhs = v_ * v_ * q_;
    int c = cmp(lhs, rhs);
    return c == 0 ? 0 : (c > 0 ? su : sv);
  }

  double approx() const { return u_.get_d() + v_.get_d() * std::sqrt(q_.get_d()); }

  friend SqrtQInt operator+(const SqrtQInt& a, const SqrtQInt& b) {
    check(a, b);
    return SqrtQInt(a.u_ + b.u_, a.v_ + b.v_, a.q_);
  }
  friend SqrtQInt operator-(const SqrtQInt& a, const SqrtQInt& b) {
    check(a, b);
    return SqrtQInt(a.u_ - b.u_, a.v_ - b.v_, a.q_);
  }
  friend SqrtQInt operator-(const SqrtQInt& a) { return SqrtQInt(-a.u_, -a.v_, a.q_); }
  friend SqrtQInt operator*(const SqrtQInt& a, const SqrtQInt& b) {
    check(a, b);
    return SqrtQInt(a.u_ * b.u_ + a.v_ * b.v_ * a.q_, a.u_ * b.v_ + a.v_ * b.u_, a.q_);
  }
  friend SqrtQInt operator*(const SqrtQInt& a, const Int& s) { return SqrtQInt(a.u_ * s, a.v_ * s, a.q_); }

  friend bool operator==(const SqrtQInt& a, const SqrtQInt& b) { return a.u_ == b.u_ && a.v_ == b.v_ && a.q_ == b.q_; }
  friend int compare(const SqrtQInt& a, const SqrtQInt& b) { return (a - b).sign(); }
  friend bool operator<(const SqrtQInt& a, const SqrtQInt& b) { return compare(a, b) < 0; }
  friend bool operator<=(const SqrtQInt& a, const SqrtQInt& b) { return compare(a, b) <= 0; }

  friend std::ostream& operator<<(std::ostream& os, const SqrtQInt& a) {
    return os << a.u_.get_str() << (a.v_ < 0 ? "-" : "+") << Int(abs(a.v_)).get_str() << "*sqrt(" << a.q_.get_str() << ")";
  }

 private:
  static void check(const SqrtQInt& a, const SqrtQInt& b) {
    if (a.q_ != b.q_) throw std::domain_error("SqrtQInt operands over different q");
  }
  void normalize() {
    if (q_ < 0) throw std::domain_error("SqrtQInt needs q >= 0");
    if (v_ != 0 && is_square(q_)) {
      u_ += v_ * isqrt(q_);
      v_ = 0;
    }
  }
  Int u_ = 0, v_ = 0, q_ = 1;
};

// Horner evaluation of an integer polynomial at a point of Z[sqrt(q)].
inline SqrtQInt eval(const IntPoly& f, const SqrtQInt& x) {
  Int u = 0, v = 0;
  const Int &xu = x.u(), &xv = x.v(), &q = x.q();
  for (std::size_t i = f.size(); i-- > 0;) {
    // (u + v s)(xu + xv s) = u xu + v xv q + (u xv + v xu) s
    Int nu = u * xu + v * xv * q + f.at(i);
    Int nv = u * xv + v * xu;
    u = std::move(nu);
    v = std::move(nv);
  }
  return SqrtQInt(u, v, q);
}

inline int sign_at(const IntPoly& f, const SqrtQInt& x) { return eval(f, x).sign(); }

}  // namespace weilcat
