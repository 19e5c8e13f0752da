#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "weilcat/weil.hpp"

namespace weilcat {

// Lower convex hull of points with distinct increasing x; returns the indices of the hull vertices.
inline std::vector<std::size_t> lower_hull(const std::vector<std::pair<long, Rat>>& pts) {
  std::vector<std::size_t> h;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    while (h.size() >= 2) {
      const auto& [x1, y1] = pts[h[h.size() - 2]];
      const auto& [x2, y2] = pts[h.back()];
      const auto& [x3, y3] = pts[k];
      // drop the middle point unless it lies strictly below the chord
      if ((y2 - y1) * (x3 - x1) >= (y3 - y1) * (x2 - x1))
        h.pop_back();
      else
        break;
    }
    h.push_back(k);
  }
  return h;
}

// Slopes read from a lower hull, one per unit of x, nondecreasing.
inline std::vector<Rat> hull_slopes(const std::vector<std::pair<long, Rat>>& pts, const std::vector<std::size_t>& h) {
  std::vector<Rat> s;
  for (std::size_t k = 1; k < h.size(); ++k) {
    const auto& [x1, y1] = pts[h[k - 1]];
    const auto& [x2, y2] = pts[h[k]];
    Rat slope = (y2 - y1) / Rat(x2 - x1);
    for (long i = x1; i < x2; ++i) s.push_back(slope);
  }
  return s;
}

// Root valuations v(alpha)/v(q) of a monic polynomial over Q_p with q = p^a, nondecreasing.
inline std::vector<Rat> root_slopes(const IntPoly& f, const Int& p, unsigned a) {
  const int n = f.degree();
  std::vector<std::pair<long, Rat>> pts;
  // x = i for the coefficient of T^{n-i}
  for (int i = 0; i <= n; ++i) {
    const Int& c = f[n - i];
    if (c == 0) continue;
    pts.emplace_back(i, Rat(static_cast<long>(valuation(c, p)), a));
  }
  for (auto& pt : pts) pt.second.canonicalize();
  return hull_slopes(pts, lower_hull(pts));
}

class NewtonPolygon {
 public:
  NewtonPolygon() = default;

  // From a full slope list (length 2g); validates the eligibility conditions.
  static NewtonPolygon from_slopes(std::vector<Rat> slopes) {
    NewtonPolygon N;
    std::sort(slopes.begin(), slopes.end());
    N.slopes_ = std::move(slopes);
    if (N.slopes_.size() % 2 != 0) throw std::invalid_argument("odd number of slopes");
    N.g_ = static_cast<int>(N.slopes_.size() / 2);
    N.heights_.assign(1, Rat(0));
    for (const Rat& s : N.slopes_) N.heights_.push_back(N.heights_.back() + s);
    return N;
  }

  int g() const { return g_; }
  const std::vector<Rat>& slopes() const { return slopes_; }
  // Height of the polygon above x = i, for i = 0..2g.
  const Rat& height(int i) const { return heights_.at(i); }

  std::vector<std::pair<int, Int>> vertices() const {
    std::vector<std::pair<int, Int>> v;
    for (int i = 0; i <= 2 * g_; ++i) {
      if (i == 0 || i == 2 * g_ || slopes_[i - 1] != slopes_[i]) {
        if (heights_[i].get_den() != 1) throw std::logic_error("Newton polygon vertex off the lattice");
        v.emplace_back(i, heights_[i].get_num());
      }
    }
    return v;
  }

  int p_rank() const { return static_cast<int>(std::count(slopes_.begin(), slopes_.end(), Rat(0))); }
  bool is_ordinary() const { return p_rank() == g_; }
  bool is_supersingular() const {
    return std::all_of(slopes_.begin(), slopes_.end(), [](const Rat& s) { return s == Rat(1, 2); });
  }
  // g = 1 is excluded: there the shape coincides with the supersingular polygon
  bool is_almost_ordinary() const {
    if (g_ < 2) return false;
    std::vector<Rat> want(g_ - 1, Rat(0));
    want.push_back(Rat(1, 2));
    want.push_back(Rat(1, 2));
    want.insert(want.end(), g_ - 1, Rat(1));
    return slopes_ == want;
  }

  std::vector<std::string> slope_strings() const {
    std::vector<std::string> out;
    for (const Rat& s : slopes_) out.push_back(s.get_str());
    return out;
  }

  friend bool operator==(const NewtonPolygon& a, const NewtonPolygon& b) { return a.slopes_ == b.slopes_; }
  friend bool operator<(const NewtonPolygon& a, const NewtonPolygon& b) {
    // total order for containers only; the polygon order is polygon_le
    return std::lexicographical_compare(a.slopes_.begin(), a.slopes_.end(), b.slopes_.begin(), b.slopes_.end());
  }

 private:
  int g_ = 0;
  std::vector<Rat> slopes_;
  std::vector<Rat> heights_;
};

inline NewtonPolygon newton_polygon(const WeilPoly& P) {
  return NewtonPolygon::from_slopes(root_slopes(P.poly(), P.context().p, P.context().a));
}

inline NewtonPolygon ordinary_polygon(int g) {
  std::vector<Rat> s(g, Rat(0));
  s.insert(s.end(), g, Rat(1));
  return NewtonPolygon::from_slopes(s);
}

inline NewtonPolygon supersingular_polygon(int g) { return NewtonPolygon::from_slopes(std::vector<Rat>(2 * g, Rat(1, 2))); }

inline bool is_eligible(const NewtonPolygon& N, int g) {
  if (N.g() != g) return false;
  const auto& s = N.slopes();
  for (const Rat& x : s)
    if (x < 0 || x > 1) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] != 1 - s[s.size() - 1 - i]) return false;
  if (N.height(2 * g) != g) return false;
  try {
    (void)N.vertices();
  } catch (const std::logic_error&) {
    return false;
  }
  return true;
}

// Lattice points (i, j) with 1 <= i <= g, j >= 0, strictly below N.
inline long elevation(const NewtonPolygon& N) {
  long count = 0;
  for (int i = 1; i <= N.g(); ++i) {
    const Rat& y = N.height(i);
    // j in [0, y): ceil(y) values
    Int c = y.get_num();
    mpz_cdiv_q(c.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    count += to_long(c);
  }
  return count;
}

// N <= N' when N' lies on or above N.
inline bool polygon_le(const NewtonPolygon& N, const NewtonPolygon& Np) {
  if (N.g() != Np.g()) throw std::invalid_argument("polygons of different dimension");
  for (int i = 0; i <= 2 * N.g(); ++i)
    if (N.height(i) > Np.height(i)) return false;
  return true;
}

inline bool polygon_lt(const NewtonPolygon& N, const NewtonPolygon& Np) { return polygon_le(N, Np) && !(N == Np); }

// One step up towards N': remove a vertex of N lying strictly below N' (and its mirror) from the
// lattice points on or above N, then take the lower hull again.
inline NewtonPolygon raise_one(const NewtonPolygon& N, const NewtonPolygon& Np) {
  if (!polygon_lt(N, Np)) throw std::invalid_argument("raise_one needs N < N'");
  const int g = N.g();
  int vi = -1;
  for (const auto& [i, j] : N.vertices()) {
    if (N.height(i) < Np.height(i)) {
      vi = i;
      break;
    }
  }
  if (vi < 0) throw std::logic_error("no vertex of N below N'");
  std::vector<std::pair<long, Rat>> pts;
  for (int x = 0; x <= 2 * g; ++x) {
    const Rat& y = N.height(x);
    Int c;
    mpz_cdiv_q(c.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
    if (x == vi || x == 2 * g - vi) c += 1;
    pts.emplace_back(x, Rat(c));
  }
  return NewtonPolygon::from_slopes(hull_slopes(pts, lower_hull(pts)));
}

// All eligible polygons in dimension g, ordered by elevation then slopes.
inline std::vector<NewtonPolygon> eligible_polygons(int g) {
  std::vector<Rat> candidates;  // slopes in [0, 1/2)
  for (long d = 1; d <= g; ++d)
    for (long c = 0; 2 * c < d; ++c)
      if (gcd(Int(c), Int(d)) == 1) candidates.emplace_back(c, d);
  std::sort(candidates.begin(), candidates.end());
  std::vector<NewtonPolygon> out;
  std::vector<Rat> left;
  std::function<void(std::size_t, long)> rec = [&](std::size_t k, long used) {
    if (k == candidates.size()) {
      std::vector<Rat> s = left;
      s.insert(s.end(), 2 * (g - used), Rat(1, 2));
      for (auto it = left.rbegin(); it != left.rend(); ++it) s.push_back(1 - *it);
      out.push_back(NewtonPolygon::from_slopes(s));
      return;
    }
    const long d = to_long(candidates[k].get_den());
    rec(k + 1, used);
    std::size_t added = 0;
    for (long len = d; used + len <= g; len += d) {
      left.insert(left.end(), d, candidates[k]);
      added += d;
      rec(k + 1, used + len);
    }
    left.resize(left.size() - added);
  };
  rec(0, 0);
  std::sort(out.begin(), out.end(), [](const NewtonPolygon& a, const NewtonPolygon& b) {
    const long ea = elevation(a), eb = elevation(b);
    return ea != eb ? ea < eb : a < b;
  });
  return out;
}

}  // namespace weilcat
