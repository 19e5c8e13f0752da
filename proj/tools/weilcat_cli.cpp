// weilcat: enumerate isogeny classes, compute their invariants, and export statistics.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "weilcat/record.hpp"

using namespace weilcat;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, usage = 1, invalid = 2, inconsistent = 3 };

std::vector<IsogenyClassRecord> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_jsonl(in);
}

// "c0,c1,...,c2g", lowest degree first; g and q are read off the degree and the constant term.
WeilPoly poly_from_text(const std::string& text) {
  std::vector<Int> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Int v;
    if (item.empty() || v.set_str(item, 10) != 0) throw std::invalid_argument("bad coefficient '" + item + "'");
    c.push_back(v);
  }
  const IntPoly f(c);
  if (f.degree() < 2 || f.degree() % 2) throw std::invalid_argument("degree must be even and positive");
  const int g = f.degree() / 2;
  Int q;
  if (f[0] <= 0 || mpz_root(q.get_mpz_t(), f[0].get_mpz_t(), static_cast<unsigned long>(g)) == 0)
    throw std::invalid_argument("constant term is not a positive g-th power");
  const auto P = WeilPoly::from_poly(make_context(g, q), f);
  if (!is_weil_polynomial(P)) throw std::invalid_argument("not a Weil polynomial");
  return P;
}

using Group = std::pair<int, Int>;

std::map<Group, std::vector<WeilPoly>> by_field(const std::vector<IsogenyClassRecord>& recs) {
  std::map<Group, std::vector<WeilPoly>> out;
  for (const auto& r : recs) out[{r.g, r.q}].push_back(r.weil_poly());
  return out;
}

class StatsSink {
 public:
  explicit StatsSink(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  void emit(const std::string& name, const CsvTable& table, const std::string& plot_kind, const std::string& title) {
    if (dir_.empty()) {
      std::cout << "# " << name << '\n';
      table.write(std::cout);
      return;
    }
    const fs::path csv = fs::path(dir_) / (name + ".csv");
    std::ofstream(csv) << [&] {
      std::ostringstream s;
      table.write(s);
      return s.str();
    }();
    if (!plot_kind.empty())
      std::ofstream(fs::path(dir_) / (name + ".plt")) << gnuplot_script(plot_kind, csv.filename().string(), title);
    std::cerr << "wrote " << csv.string() << '\n';
  }

 private:
  std::string dir_;
};

std::string tag(const Group& k) { return std::to_string(k.first) + "_" + k.second.get_str(); }

std::string join_labels(const std::vector<WeilPoly>& v) {
  std::string s;
  for (const auto& P : v) s += (s.empty() ? "" : " ") + make_label(P);
  return s;
}

std::string polygon_name(const NewtonPolygon& N) {
  std::string s;
  for (const auto& x : N.slope_strings()) s += (s.empty() ? "" : " ") + x;
  return s;
}

void run_stats(const std::string& kind, const std::vector<IsogenyClassRecord>& recs, StatsSink& sink) {
  const auto groups = by_field(recs);
  if (groups.empty()) throw std::invalid_argument("no records");

  if (kind == "counts") {
    CsvTable t{{"g", "q", "total", "ordinary", "predicted_total", "predicted_ordinary", "total_ratio"}, {}};
    for (const auto& [k, classes] : groups) {
      std::size_t ord = 0;
      for (const auto& P : classes) ord += newton_polygon(P).is_ordinary();
      const auto pred = dipippo_howe_volume(k.first, k.second);
      t.rows.push_back({std::to_string(k.first), k.second.get_str(), std::to_string(classes.size()), std::to_string(ord),
                        fmt(static_cast<double>(pred.total)), fmt(static_cast<double>(pred.ordinary)),
                        fmt(static_cast<double>(classes.size()) / static_cast<double>(pred.total))});
    }
    sink.emit("counts", t, "", "");
  } else if (kind == "newton") {
    std::map<int, CsvTable> per_g;
    for (const auto& [k, classes] : groups) {
      auto polys = eligible_polygons(k.first);
      std::sort(polys.begin(), polys.end(), [](const auto& a, const auto& b) { return elevation(a) < elevation(b) || (elevation(a) == elevation(b) && a < b); });
      auto& t = per_g[k.first];
      if (t.header.empty()) {
        t.header.push_back("q");
        for (const auto& N : polys) t.header.push_back(polygon_name(N));
      }
      std::vector<std::string> row{k.second.get_str()};
      for (const auto& N : polys) row.push_back(fmt(newton_stratum_ratio(classes, N)));
      t.rows.push_back(std::move(row));
    }
    for (const auto& [g, t] : per_g)
      sink.emit("newton_" + std::to_string(g), t, "strata", "log_q share on or above each polygon, g = " + std::to_string(g));
  } else if (kind == "sato-tate") {
    for (const auto& [k, classes] : groups) {
      const auto& model = density_model(k.first);
      const auto dist = empirical_error_distribution(classes, model);
      auto t = histogram_csv(dist.histogram, &model);
      sink.emit("sato_tate_" + tag(k), t, "histogram", "normalized count error, g = " + std::to_string(k.first) + ", q = " + k.second.get_str());
      std::cerr << "g=" << k.first << " q=" << k.second << " ks=" << fmt(dist.ks) << '\n';
    }
  } else if (kind == "extremes") {
    CsvTable t{{"g", "q", "scope", "min_count", "max_count", "min_root", "max_root", "minimal", "maximal", "twisted_pair"}, {}};
    for (const auto& [k, classes] : groups) {
      for (const std::string scope : {"all", "simple"}) {
        std::vector<WeilPoly> pool;
        for (const auto& P : classes)
          if (scope == "all" || is_simple(P)) pool.push_back(P);
        if (pool.empty()) continue;
        const auto e = extremes(pool);
        const double inv = 1.0 / k.first;
        t.rows.push_back({std::to_string(k.first), k.second.get_str(), scope, e.min_count.get_str(), e.max_count.get_str(),
                          fmt(std::pow(e.min_count.get_d(), inv)), fmt(std::pow(e.max_count.get_d(), inv)),
                          join_labels(e.minimal), join_labels(e.maximal), e.twisted_pair ? "true" : "false"});
      }
    }
    sink.emit("extremes", t, "", "");
  } else if (kind == "disc") {
    for (const auto& [k, classes] : groups) {
      Histogram h(0, 1, 50);
      for (const auto& r : recs)
        if (r.g == k.first && r.q == k.second) h.add(r.normalized_poly_rd);
      sink.emit("disc_" + tag(k), histogram_csv(h), "histogram", "normalized polynomial root discriminant, g = " + std::to_string(k.first) + ", q = " + k.second.get_str());
    }
  } else if (kind == "fit") {
    std::map<int, std::vector<std::pair<double, double>>> points;
    for (const auto& [k, classes] : groups) points[k.first].emplace_back(k.second.get_d(), static_cast<double>(classes.size()));
    CsvTable fits{{"g", "slope", "intercept", "rms_residual", "predicted_slope", "predicted_intercept", "points"}, {}};
    for (const auto& [g, pts] : points) {
      CsvTable raw{{"q", "count"}, {}};
      for (auto [q, n] : pts) raw.rows.push_back({fmt(q), fmt(n)});
      sink.emit("fit_points_" + std::to_string(g), raw, "loglog", "class counts, g = " + std::to_string(g));
      if (pts.size() < 2) continue;
      const auto f = loglog_fit(pts), pred = predicted_fit(g);
      fits.rows.push_back({std::to_string(g), fmt(f.a), fmt(f.b), fmt(f.residual), fmt(pred.a), fmt(pred.b), std::to_string(pts.size())});
    }
    sink.emit("fit", fits, "", "");
  } else {
    throw std::invalid_argument("unknown stats kind " + kind);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isogeny classes of abelian varieties over finite fields"};
  app.require_subcommand(1);

  int g = 1;
  std::string q_text, out_path, label_text, poly_text, in_path, csv_dir, stats_kind;
  bool simple_only = false, ordinary_only = false;
  unsigned jobs = 1, r_ext = 1, grid = 100;
  int horizon = 0;
  std::vector<std::string> subfield_paths, label_args;
  std::optional<double> x_value;

  auto* en = app.add_subcommand("enumerate", "JSONL records for every isogeny class of dimension G over F_Q");
  en->add_option("G", g, "dimension")->required()->check(CLI::PositiveNumber);
  en->add_option("Q", q_text, "field size (a prime power)")->required();
  en->add_flag("--simple", simple_only, "only simple classes");
  en->add_flag("--ordinary", ordinary_only, "only ordinary classes");
  en->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  en->add_option("--horizon", horizon, "number of extension degrees for point counts (default max(2g, 10))");
  en->add_option("--out", out_path, "output file (default stdout)");

  auto* inv = app.add_subcommand("invariants", "one record as JSON");
  auto* inv_label = inv->add_option("LABEL", label_text, "class label, e.g. 2.2.a_ad");
  auto* inv_poly = inv->add_option("--poly", poly_text, "coefficients c0,c1,...,c2g, lowest degree first");
  inv_label->excludes(inv_poly);
  inv->add_option("--horizon", horizon, "number of extension degrees for point counts");

  auto* bc = app.add_subcommand("basechange", "label and polynomial of the base change to F_{q^R}");
  bc->add_option("LABEL", label_text)->required();
  bc->add_option("R", r_ext)->required()->check(CLI::PositiveNumber);

  auto* tw = app.add_subcommand("twists", "twist class partition of a record file");
  tw->add_option("--in", in_path)->required();

  auto* pr = app.add_subcommand("primitive", "annotate records with primitivity from subfield record files");
  pr->add_option("--in", in_path)->required();
  pr->add_option("--subfields", subfield_paths)->required();

  auto* st = app.add_subcommand("stats", "statistics over a record file");
  st->add_option("KIND", stats_kind)->required()->check(CLI::IsMember({"counts", "newton", "sato-tate", "extremes", "disc", "fit"}));
  st->add_option("--in", in_path)->required();
  st->add_option("--csv", csv_dir, "write CSV and gnuplot files here instead of stdout");

  auto* lb = app.add_subcommand("label", "encode or decode class labels");
  lb->add_option("ACTION", label_text)->required()->check(CLI::IsMember({"encode", "decode"}));
  lb->add_option("ARGS", label_args, "encode: G Q a1 .. ag; decode: LABEL")->required();

  auto* de = app.add_subcommand("density", "limiting density of the normalized count error");
  de->add_option("G", g)->required()->check(CLI::PositiveNumber);
  auto* grid_opt = de->add_option("--grid", grid, "number of grid intervals over [-2g, 2g]")->check(CLI::PositiveNumber);
  de->add_option("--x", x_value, "single point")->excludes(grid_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (en->parsed()) {
      EnumerateRequest req;
      req.g = g;
      req.q = Int(q_text);
      req.simple_only = simple_only;
      req.ordinary_only = ordinary_only;
      req.jobs = jobs;
      req.horizon = horizon;
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::invalid_argument("cannot write " + out_path);
      }
      const auto summary = write_class_records(req, out_path.empty() ? std::cout : file);
      for (const auto& reason : summary.skipped) std::clog << "skipped " << reason << '\n';
      std::clog << summary.written << " records, " << summary.skipped.size() << " skipped\n";
    } else if (inv->parsed()) {
      if (label_text.empty() == poly_text.empty()) throw CLI::ValidationError("give LABEL or --poly");
      const WeilPoly P = poly_text.empty() ? parse_label(label_text) : poly_from_text(poly_text);
      if (!is_weil_polynomial(P)) throw std::invalid_argument(make_label(P) + " is not a Weil polynomial");
      const WeilContext& ctx = P.context();
      const SubfieldClasses subs = ctx.a > 1 ? subfield_classes(P.g(), ctx) : SubfieldClasses{};
      std::cout << to_json(build_record(P, {horizon, &subs})).dump(2) << '\n';
    } else if (bc->parsed()) {
      const auto P = parse_label(label_text);
      if (!is_weil_polynomial(P)) throw std::invalid_argument(label_text + " is not a Weil polynomial");
      const auto B = base_change(P, r_ext);
      std::cout << make_label(B) << '\n' << B.poly().to_string('T') << '\n';
    } else if (tw->parsed()) {
      const auto recs = load(in_path);
      std::vector<WeilPoly> classes;
      for (const auto& r : recs) classes.push_back(r.weil_poly());
      auto parts = twist_classes(classes);
      std::sort(parts.begin(), parts.end());
      std::vector<std::size_t> id(classes.size());
      for (std::size_t k = 0; k < parts.size(); ++k)
        for (auto i : parts[k]) id[i] = k;
      CsvTable t{{"label", "twist_class", "representative"}, {}};
      for (std::size_t i = 0; i < classes.size(); ++i)
        t.rows.push_back({recs[i].label, std::to_string(id[i]), recs[parts[id[i]].front()].label});
      t.write(std::cout);
    } else if (pr->parsed()) {
      auto recs = load(in_path);
      SubfieldClasses subs;
      for (const auto& path : subfield_paths)
        for (const auto& r : load(path)) {
          const auto P = r.weil_poly();
          subs[P.context().a].push_back(P);
        }
      for (auto& r : recs) {
        const auto P = r.weil_poly();
        const unsigned a = P.context().a;
        // every proper subfield needs its class list, otherwise the verdict stays undecided
        bool have_all = true;
        for (unsigned d = 1; d < a; ++d)
          if (a % d == 0 && !subs.count(d)) have_all = false;
        if (a == 1) {
          r.primitive = true;
          r.primitive_models.clear();
        } else if (have_all) {
          const auto res = is_primitive(P, subs);
          r.primitive = res.primitive;
          r.primitive_models.clear();
          for (const auto& m : res.models) r.primitive_models.push_back(make_label(m));
        } else {
          r.primitive.reset();
          r.primitive_models.clear();
        }
        std::cout << to_jsonl(r) << '\n';
      }
    } else if (st->parsed()) {
      StatsSink sink(csv_dir);
      run_stats(stats_kind, load(in_path), sink);
    } else if (lb->parsed()) {
      if (label_text == "decode") {
        if (label_args.size() != 1) throw CLI::ValidationError("decode takes one label");
        const auto P = parse_label(label_args[0]);
        std::cout << "g=" << P.g() << " q=" << P.q() << " a=[";
        for (int i = 1; i <= P.g(); ++i) std::cout << (i > 1 ? "," : "") << P.a(i);
        std::cout << "]\n";
      } else {
        if (label_args.size() < 3) throw CLI::ValidationError("encode takes G Q a1 .. ag");
        const int gg = std::stoi(label_args[0]);
        if (static_cast<int>(label_args.size()) != gg + 2) throw CLI::ValidationError("encode needs exactly G coefficients");
        std::vector<Int> half;
        for (std::size_t i = 2; i < label_args.size(); ++i) {
          Int v;
          if (v.set_str(label_args[i], 10) != 0) throw std::invalid_argument("bad coefficient " + label_args[i]);
          half.push_back(v);
        }
        std::cout << make_label(WeilPoly::from_half(make_context(gg, Int(label_args[1])), half)) << '\n';
      }
    } else if (de->parsed()) {
      const auto& model = density_model(g);
      std::cout << "x,density\n";
      if (x_value) {
        std::cout << fmt(*x_value) << ',' << fmt(model(*x_value)) << '\n';
      } else {
        for (unsigned i = 0; i <= grid; ++i) {
          const double x = -2.0 * g + 4.0 * g * i / grid;
          std::cout << fmt(x) << ',' << fmt(model(x)) << '\n';
        }
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return Exit::usage;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal consistency failure: " << e.what() << '\n';
    return Exit::inconsistent;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return Exit::invalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return Exit::invalid;
  }
  return Exit::ok;
}
