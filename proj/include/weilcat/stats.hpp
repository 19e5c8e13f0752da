#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "weilcat/extensions.hpp"
#include "weilcat/honda_tate.hpp"
#include "weilcat/newton.hpp"
#include "weilcat/resultant.hpp"

namespace weilcat {

// ---------------------------------------------------------------- volume heuristic

struct VolumePrediction {
  Rat constant;          // coefficient of q^{g(g+1)/4}
  long double total = 0;
  long double ordinary = 0;  // total * phi(q) / q
};

inline Rat dipippo_howe_constant(int g) {
  if (g < 1) throw std::invalid_argument("g must be positive");
  Rat c(Int(1) << g, factorial(static_cast<unsigned long>(g)));
  for (int i = 1; i <= g; ++i) {
    const Rat ratio(2 * i, 2 * i - 1);
    for (int k = 0; k < g + 1 - i; ++k) c *= ratio;
  }
  c.canonicalize();
  return c;
}

inline VolumePrediction dipippo_howe_volume(int g, const Int& q) {
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  VolumePrediction v;
  v.constant = dipippo_howe_constant(g);
  v.total = static_cast<long double>(v.constant.get_d()) *
            std::pow(static_cast<long double>(q.get_d()), static_cast<long double>(g * (g + 1)) / 4);
  v.ordinary = v.total * static_cast<long double>(euler_phi(q).get_d()) / static_cast<long double>(q.get_d());
  return v;
}

// ---------------------------------------------------------------- isogeny Sato-Tate densities

// A polynomial in |x| valid for lo <= |x| <= hi.
struct PolyPiece {
  Rat lo, hi;
  std::vector<Rat> coeffs;  // lowest degree first
};

struct MomentEstimate {
  double value = 0;
  double std_error = 0;  // zero for exact values
  bool exact = false;
};

struct MonteCarloOptions {
  std::uint64_t samples = 10'000'000;
  std::uint64_t seed = rng_seed();
  unsigned threads = 1;
  int bins = 4000;
};

namespace detail {

// c * (a - |x|)^n expanded in powers of |x|.
inline std::vector<Rat> shifted_power(const Rat& c, long a, unsigned n) {
  std::vector<Rat> out(n + 1);
  for (unsigned k = 0; k <= n; ++k) {
    Rat term = c * Rat(binomial(n, k)) * Rat(ipow(Int(a), n - k));
    if (k % 2) term = -term;
    out[k] = term;
  }
  return out;
}

inline std::vector<Rat> scaled(const Rat& c, std::initializer_list<long> coeffs) {
  std::vector<Rat> out;
  for (long v : coeffs) out.push_back(c * Rat(v));
  return out;
}

inline long double eval(const std::vector<Rat>& p, long double x) {
  long double acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + static_cast<long double>(p[i].get_d());
  return acc;
}

// Antiderivative vanishing at 0.
inline std::vector<Rat> integral(const std::vector<Rat>& p) {
  std::vector<Rat> out(p.size() + 1, Rat(0));
  for (std::size_t i = 0; i < p.size(); ++i) out[i + 1] = p[i] / Rat(static_cast<long>(i + 1));
  return out;
}

// Weighted sample statistics of s = r_1 + ... + r_g with weight V(r) over the ordered simplex.
struct SumAccumulator {
  static constexpr int max_power = 28;
  int g = 0, bins = 0;
  std::uint64_t n = 0;
  std::array<double, max_power + 1> w_pow{}, w2_pow{};  // sum w s^k, sum w^2 s^k
  std::vector<double> hist;

  SumAccumulator(int g_, int bins_) : g(g_), bins(bins_), hist(static_cast<std::size_t>(bins_), 0.0) {}

  void add(double s, double w) {
    ++n;
    double pk = 1;
    for (int k = 0; k <= max_power; ++k) {
      w_pow[k] += w * pk;
      w2_pow[k] += w * w * pk;
      pk *= s;
    }
    const double span = 4.0 * g;
    auto b = static_cast<long>((s + 2.0 * g) / span * bins);
    hist[static_cast<std::size_t>(std::clamp(b, 0L, static_cast<long>(bins) - 1))] += w;
  }

  void merge(const SumAccumulator& o) {
    n += o.n;
    for (int k = 0; k <= max_power; ++k) {
      w_pow[k] += o.w_pow[k];
      w2_pow[k] += o.w2_pow[k];
    }
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] += o.hist[i];
  }
};

inline SumAccumulator sample_chunk(int g, std::uint64_t count, std::uint64_t seed, std::uint64_t chunk, int bins) {
  std::seed_seq seq{seed, chunk, static_cast<std::uint64_t>(g)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  SumAccumulator acc(g, bins);
  std::vector<double> r(static_cast<std::size_t>(g));
  for (std::uint64_t i = 0; i < count; ++i) {
    // a sorted uniform point of the cube is a uniform point of the ordered simplex
    for (auto& v : r) v = unif(rng);
    std::sort(r.begin(), r.end());
    double w = 1, s = 0;
    for (int a = 0; a < g; ++a) {
      s += r[a];
      for (int b = a + 1; b < g; ++b) w *= r[b] - r[a];
    }
    acc.add(s, w);
  }
  return acc;
}

}  // namespace detail

class DensityModel {
 public:
  // Exact piecewise form for g <= 4.
  static DensityModel closed_form(int g) {
    DensityModel m;
    m.g_ = g;
    switch (g) {
      case 1: m.pieces_ = {{Rat(0), Rat(2), {Rat(1, 4)}}}; break;
      case 2: m.pieces_ = {{Rat(0), Rat(4), detail::shifted_power(Rat(3, 128), 4, 2)}}; break;
      case 3:
        m.pieces_ = {{Rat(0), Rat(2), detail::scaled(Rat(3, 8192), {816, 0, -200, 0, 15})},
                     {Rat(2), Rat(6), detail::shifted_power(Rat(3, 32768), 6, 5)}};
        break;
      case 4: {
        const Rat c(5, 3 * (1L << 27));
        m.pieces_ = {{Rat(0), Rat(4), detail::scaled(c, {24117248, 0, -7077888, 0, 1548288, -516096, 64512, -2304, -72, -1})},
                     {Rat(4), Rat(8), detail::shifted_power(c, 8, 9)}};
        break;
      }
      default: throw std::invalid_argument("closed forms exist for g <= 4 only");
    }
    return m;
  }

  // Vandermonde-weighted sampling of the ordered simplex; seeded, chunked into independent substreams.
  static DensityModel monte_carlo(int g, const MonteCarloOptions& opt = {}) {
    if (g < 1) throw std::invalid_argument("g must be positive");
    constexpr std::uint64_t chunk_size = 1 << 18;
    const std::uint64_t chunks = (opt.samples + chunk_size - 1) / chunk_size;
    std::vector<detail::SumAccumulator> parts(chunks, detail::SumAccumulator(g, opt.bins));
    auto run = [&](unsigned worker, unsigned workers) {
      for (std::uint64_t c = worker; c < chunks; c += workers) {
        const std::uint64_t count = std::min(chunk_size, opt.samples - c * chunk_size);
        parts[c] = detail::sample_chunk(g, count, opt.seed, c, opt.bins);
      }
    };
    const unsigned workers = std::max(1u, opt.threads);
    if (workers == 1) {
      run(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
      for (auto& t : pool) t.join();
    }
    DensityModel m;
    m.g_ = g;
    m.mc_.emplace(g, opt.bins);
    for (const auto& p : parts) m.mc_->merge(p);  // fixed order keeps results independent of thread count
    return m;
  }

  int g() const { return g_; }
  bool exact() const { return !mc_.has_value(); }
  const std::vector<PolyPiece>& pieces() const { return pieces_; }
  double support() const { return 2.0 * g_; }

  double operator()(double x) const {
    const double ax = std::fabs(x);
    if (ax > support()) return 0;
    if (exact()) {
      for (const auto& p : pieces_)
        if (ax <= p.hi.get_d()) return static_cast<double>(detail::eval(p.coeffs, ax));
      return 0;
    }
    // Gaussian kernel over the fine histogram, reflected at the support edges.
    const auto& hist = mc_->hist;
    const double total = mc_->w_pow[0], width = 4.0 * g_ / mc_->bins;
    const double h = bandwidth();
    double acc = 0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      if (hist[i] == 0) continue;
      const double c = -support() + (static_cast<double>(i) + 0.5) * width;
      for (double mirror : {c, 2 * support() - c, -2 * support() - c}) {
        const double z = (x - mirror) / h;
        if (std::fabs(z) < 8) acc += hist[i] * std::exp(-0.5 * z * z);
      }
    }
    return acc / (total * h * std::sqrt(2 * M_PI));
  }

  double cdf(double x) const {
    if (x <= -support()) return 0;
    if (x >= support()) return 1;
    if (exact()) {
      const double ax = std::fabs(x);
      long double area = 0;
      for (const auto& p : pieces_) {
        const auto F = detail::integral(p.coeffs);
        const long double lo = p.lo.get_d(), hi = std::min<long double>(p.hi.get_d(), ax);
        if (hi <= lo) break;
        area += detail::eval(F, hi) - detail::eval(F, lo);
      }
      return static_cast<double>(x >= 0 ? 0.5L + area : 0.5L - area);
    }
    const auto& hist = mc_->hist;
    const double width = 4.0 * g_ / mc_->bins, pos = (x + support()) / width;
    const auto full = static_cast<std::size_t>(pos);
    double acc = 0;
    for (std::size_t i = 0; i < full && i < hist.size(); ++i) acc += hist[i];
    if (full < hist.size()) acc += hist[full] * (pos - static_cast<double>(full));
    return acc / mc_->w_pow[0];
  }

  Rat exact_moment(int r) const {
    if (!exact()) throw std::logic_error("Monte Carlo model has no exact moments");
    if (r % 2) return Rat(0);
    Rat total = 0;
    for (const auto& p : pieces_) {
      std::vector<Rat> shifted(static_cast<std::size_t>(r), Rat(0));
      shifted.insert(shifted.end(), p.coeffs.begin(), p.coeffs.end());
      const auto F = detail::integral(shifted);
      Rat hi = 0, lo = 0;
      for (std::size_t i = F.size(); i-- > 0;) {
        hi = hi * p.hi + F[i];
        lo = lo * p.lo + F[i];
      }
      total += hi - lo;
    }
    return 2 * total;
  }

  MomentEstimate moment(int r) const {
    if (r < 0 || r > detail::SumAccumulator::max_power / 2) throw std::invalid_argument("moment order out of range");
    if (exact()) return {exact_moment(r).get_d(), 0, true};
    // self-normalized importance estimate and its delta-method standard error
    const auto& a = *mc_;
    const double W = a.w_pow[0], m = a.w_pow[r] / W;
    const double var = (a.w2_pow[2 * r] - 2 * m * a.w2_pow[r] + m * m * a.w2_pow[0]) / (W * W);
    return {m, std::sqrt(std::max(0.0, var)), false};
  }

  // Mean Vandermonde weight over the cube, which is 4^{-g} times the integral of |V| over [-2,2]^g.
  MomentEstimate mean_weight() const {
    if (exact()) throw std::logic_error("closed forms carry no sampling weight");
    const auto& a = *mc_;
    const double n = static_cast<double>(a.n), mean = a.w_pow[0] / n;
    const double var = (a.w2_pow[0] / n - mean * mean) / n;
    return {mean, std::sqrt(std::max(0.0, var)), false};
  }

 private:
  double bandwidth() const {
    const auto& a = *mc_;
    const double W = a.w_pow[0], sd = std::sqrt(a.w_pow[2] / W);
    const double n_eff = W * W / a.w2_pow[0];
    return std::max(1.06 * sd * std::pow(n_eff, -0.2), 4.0 * g_ / mc_->bins);
  }

  int g_ = 0;
  std::vector<PolyPiece> pieces_;
  std::optional<detail::SumAccumulator> mc_;
};

// Closed form for g <= 4, otherwise a cached default Monte Carlo model.
inline const DensityModel& density_model(int g) {
  static std::mutex lock;
  static std::map<int, DensityModel> cache;
  std::lock_guard guard(lock);
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, g <= 4 ? DensityModel::closed_form(g) : DensityModel::monte_carlo(g)).first;
  return it->second;
}

inline double sato_tate_density(int g, double x) { return density_model(g)(x); }
inline MomentEstimate density_moment(int g, int r) { return density_model(g).moment(r); }

inline double double_factorial(int n) {
  double out = 1;
  for (int k = n; k > 1; k -= 2) out *= k;
  return out;
}

// Moment of order r of a centred Gaussian with second moment m2.
inline double gaussian_moment_prediction(double m2, int r) {
  if (r < 0 || r % 2) throw std::invalid_argument("r must be even");
  return std::pow(m2, r / 2) * double_factorial(r - 1);
}

// ---------------------------------------------------------------- empirical distributions

struct Histogram {
  double lo = 0, hi = 0;
  std::vector<long> counts;

  Histogram(double lo_, double hi_, int bins) : lo(lo_), hi(hi_), counts(static_cast<std::size_t>(bins), 0) {}
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
  void add(double v) {
    auto b = static_cast<long>(std::floor((v - lo) / bin_width()));
    counts[static_cast<std::size_t>(std::clamp(b, 0L, static_cast<long>(counts.size()) - 1))] += 1;
  }
  long total() const {
    long t = 0;
    for (long c : counts) t += c;
    return t;
  }
};

// (#A(F_q) - q^g) / q^{g - 1/2}
inline double normalized_error(const WeilPoly& P) {
  const int g = P.g();
  const long double q = P.q().get_d();
  const Int diff = P.poly()(Int(1)) - ipow(P.q(), static_cast<unsigned long>(g));
  return static_cast<double>(static_cast<long double>(diff.get_d()) / std::pow(q, g - 0.5L));
}

// Largest gap between the empirical distribution function of `values` and `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> values, const Cdf& cdf) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double F = cdf(values[i]);
    d = std::max({d, std::fabs(F - static_cast<double>(i) / n), std::fabs(static_cast<double>(i + 1) / n - F)});
  }
  return d;
}

struct ErrorDistribution {
  int g = 0;
  Int q;
  std::vector<double> values;
  Histogram histogram{0, 1, 1};
  double ks = 0;  // descriptive only
};

inline ErrorDistribution empirical_error_distribution(const std::vector<WeilPoly>& classes, const DensityModel& model,
                                                      int bins = 48) {
  if (classes.empty()) throw std::invalid_argument("no classes");
  ErrorDistribution out;
  out.g = classes.front().g();
  out.q = classes.front().q();
  for (const auto& P : classes) {
    if (P.g() != out.g || P.q() != out.q) throw std::invalid_argument("classes must share (g, q)");
    out.values.push_back(normalized_error(P));
  }
  const auto [mn, mx] = std::minmax_element(out.values.begin(), out.values.end());
  const double edge = std::max({2.0 * out.g, -*mn, *mx});
  out.histogram = Histogram(-edge, edge, bins);
  for (double v : out.values) out.histogram.add(v);
  out.ks = ks_distance(out.values, [&](double x) { return model.cdf(x); });
  return out;
}

// ---------------------------------------------------------------- extremes

struct Extremes {
  Int min_count, max_count;
  std::vector<WeilPoly> minimal, maximal;
  // unique extremes with P_max(T) = P_min(-T)
  bool twisted_pair = false;
};

inline Extremes extremes(const std::vector<WeilPoly>& classes) {
  if (classes.empty()) throw std::invalid_argument("no classes");
  Extremes e;
  bool first = true;
  for (const auto& P : classes) {
    const Int n = P.poly()(Int(1));
    if (first || n < e.min_count) {
      e.min_count = n;
      e.minimal.clear();
    }
    if (first || n > e.max_count) {
      e.max_count = n;
      e.maximal.clear();
    }
    first = false;
    if (n == e.min_count) e.minimal.push_back(P);
    if (n == e.max_count) e.maximal.push_back(P);
  }
  e.twisted_pair = e.minimal.size() == 1 && e.maximal.size() == 1 &&
                   e.maximal[0].poly() == e.minimal[0].poly().negate_var();
  return e;
}

inline Extremes simple_extremes(const std::vector<WeilPoly>& classes) {
  std::vector<WeilPoly> simple;
  for (const auto& P : classes)
    if (is_simple(P)) simple.push_back(P);
  return extremes(simple);
}

// ---------------------------------------------------------------- fits, strata, coverage

struct FitResult {
  double a = 0, b = 0;
  double residual = 0;  // root mean square of log N - (a log q + b)
};

// Least squares for log N = a log q + b over points (q, N).
inline FitResult loglog_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("need two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (auto [q, N] : points) {
    const double x = std::log(q), y = std::log(N);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  FitResult f;
  f.a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.b = (sy - f.a * sx) / n;
  double ss = 0;
  for (auto [q, N] : points) ss += std::pow(std::log(N) - f.a * std::log(q) - f.b, 2);
  f.residual = std::sqrt(ss / n);
  return f;
}

// The volume heuristic as a line: a = g(g+1)/4, b = log of the constant.
inline FitResult predicted_fit(int g) {
  return {g * (g + 1) / 4.0, std::log(dipippo_howe_constant(g).get_d()), 0};
}

// log_q of the share of classes whose polygon lies on or above `base`; -inf when none does.
inline double newton_stratum_ratio(const std::vector<WeilPoly>& classes, const NewtonPolygon& base) {
  if (classes.empty()) throw std::invalid_argument("no classes");
  std::size_t above = 0;
  for (const auto& P : classes) above += polygon_le(base, newton_polygon(P));
  if (above == 0) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(above) / static_cast<double>(classes.size())) / std::log(classes.front().q().get_d());
}

// covered[f]: some simple class has p-rank f.
inline std::vector<bool> prank_coverage(const std::vector<WeilPoly>& classes) {
  if (classes.empty()) return {};
  std::vector<bool> covered(static_cast<std::size_t>(classes.front().g()) + 1, false);
  for (const auto& P : classes)
    if (is_simple(P)) covered[static_cast<std::size_t>(newton_polygon(P).p_rank())] = true;
  return covered;
}

// For each angle rank 0..g, the p-ranks that never occur among the given (angle rank, p-rank) pairs.
inline std::vector<std::set<int>> rank_prank_exclusions(int g, const std::vector<std::pair<int, int>>& delta_prank) {
  std::vector<std::set<int>> seen(static_cast<std::size_t>(g) + 1), excluded(static_cast<std::size_t>(g) + 1);
  for (auto [d, f] : delta_prank) seen.at(static_cast<std::size_t>(d)).insert(f);
  for (int d = 0; d <= g; ++d)
    for (int f = 0; f <= g; ++f)
      if (!seen[d].count(f)) excluded[d].insert(f);
  return excluded;
}

// ---------------------------------------------------------------- discriminants

// Disc(P) = q^{g(g-1)} Disc(Q)^2 prod (beta_i^2 - 4q), the product being Res(Q, x^2 - 4q).
inline bool discriminant_identity_holds(const WeilPoly& P) {
  const IntPoly Q = real_weil(P).poly();
  const Int& q = P.q();
  const Int dQ = P.g() == 1 ? Int(1) : discriminant(Q);
  const Int rhs = ipow(q, static_cast<unsigned long>(P.g() * (P.g() - 1))) * dQ * dQ *
                  resultant(Q, IntPoly(std::vector<Int>{Int(-4 * q), 0, 1}));
  return discriminant(P.poly()) == rhs;
}

// |Disc P|^{1/2g} / (2g q^{(2g-1)/2}); the maximal polynomial discriminant makes this at most 1.
inline double normalized_poly_root_discriminant(const WeilPoly& P) {
  const Int d = abs(discriminant(P.poly()));
  if (d == 0) return 0;
  // the bound itself: |Disc| <= (2g)^{2g} q^{g(2g-1)}
  const unsigned long two_g = 2ul * static_cast<unsigned long>(P.g());
  const Int bound = ipow(Int(two_g), two_g) * ipow(P.q(), static_cast<unsigned long>(P.g()) * (two_g - 1));
  if (d > bound) throw ConsistencyError("polynomial discriminant exceeds the Weil bound");
  if (d == bound) return 1.0;
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, d.get_mpz_t());
  const double log_d = std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
  const int g = P.g();
  const double log_norm = std::log(2.0 * g) + (2 * g - 1) / 2.0 * std::log(P.q().get_d());
  // d < bound exactly, so keep rounding from reaching 1
  return std::min(std::exp(log_d / (2 * g) - log_norm), std::nextafter(1.0, 0.0));
}

inline Histogram disc_histogram(const std::vector<WeilPoly>& classes, int bins = 50) {
  Histogram h(0, 1, bins);
  for (const auto& P : classes) h.add(normalized_poly_root_discriminant(P));
  return h;
}

// ---------------------------------------------------------------- output

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const {
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

inline CsvTable histogram_csv(const Histogram& h, const DensityModel* model = nullptr) {
  CsvTable t{{"center", "count", "empirical_density", "model_density"}, {}};
  const double total = static_cast<double>(std::max(1L, h.total()));
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double c = h.center(i);
    t.rows.push_back({fmt(c), std::to_string(h.counts[i]), fmt(static_cast<double>(h.counts[i]) / (total * h.bin_width())),
                      model ? fmt((*model)(c)) : std::string()});
  }
  return t;
}

// gnuplot script drawing columns of a CSV written by this module.
inline std::string gnuplot_script(const std::string& kind, const std::string& csv, const std::string& title) {
  std::ostringstream s;
  s << "set datafile separator ','\nset key autotitle columnhead\nset title '" << title << "'\n";
  if (kind == "histogram") {
    s << "set style fill solid 0.4\nplot '" << csv << "' using 1:3 with boxes title 'data', '" << csv
      << "' using 1:4 with lines lw 2 title 'density'\n";
  } else if (kind == "loglog") {
    s << "set xlabel 'log q'\nset ylabel 'log N'\nplot '" << csv << "' using (log($1)):(log($2)) with points pt 7 title 'N(g,q)'\n";
  } else if (kind == "strata") {
    s << "set xlabel 'q'\nset ylabel 'log_q ratio'\nplot for [i=2:*] '" << csv << "' using 1:i with linespoints\n";
  } else {
    throw std::invalid_argument("unknown plot kind: " + kind);
  }
  return s.str();
}

}  // namespace weilcat
