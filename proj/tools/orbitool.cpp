// orbitool: batch front-end over presentation/representation files.
#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orbt/bundle.hpp"
#include "orbt/circle_numeric.hpp"
#include "orbt/io.hpp"
#include "orbt/ruelle.hpp"
#include "orbt/torsion.hpp"
#include "orbt/verify.hpp"

using namespace orbt;

namespace {

struct Options {
  std::string pres_path;
  std::string rep_path;
  double tol = -1.0;
  double cutoff = -1.0;
  std::string lmax;
  std::string t_grid = "0.05,0.1,0.5,1,2,5";
  std::string sigma_grid = "0.25,0.5,1,2";
  std::string out_dir;
  std::string cache_dir;
  bool json = false;
};

std::string timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::vector<double> parse_grid(const std::string& s, bool allow_zero) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    if (cur.empty()) continue;
    double v = std::stod(cur);
    if (v < 0.0 || (!allow_zero && v == 0.0))
      throw Error(Errc::BadInput, "grid entries must be positive: " + s);
    out.push_back(v);
  }
  if (out.empty()) throw Error(Errc::BadInput, "empty grid: " + s);
  std::sort(out.begin(), out.end());
  return out;
}

Rat parse_lmax(const std::string& s, long fallback) {
  if (s.empty()) return Rat(fallback);
  Rat v = parse_rat(s);
  if (v <= 0) throw Error(Errc::BadInput, "l_max must be positive");
  return v;
}

double pick_tol(const Options& o, double fallback) { return o.tol > 0 ? o.tol : fallback; }

Json make_report(const std::string& command) {
  Json j;
  j["command"] = command;
  j["generated_at"] = timestamp();
  return j;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::BadInput, "cannot write " + path);
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

int finish(const Options& o, Json& report, bool pass, const std::vector<std::string>& human) {
  report["pass"] = pass;
  if (o.json) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& line : human) std::cout << line << "\n";
    std::cout << (pass ? "pass" : "fail") << "\n";
  }
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    std::string path = o.out_dir + "/" + report["command"].get<std::string>() + ".json";
    std::ofstream out(path);
    out << report.dump(2) << "\n";
  }
  return pass ? 0 : 3;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

struct Loaded {
  QuotientPresentation raw;
  CheckedPresentation cp;
};

Loaded load_checked(const std::string& path) {
  Loaded l{load_presentation(path), {}};
  l.cp = validate_presentation(l.raw);
  return l;
}

CheckedRep load_rep_checked(const CheckedPresentation& cp, const std::string& path) {
  return validate_rep(cp, load_rep_json(path, cp.p));
}

SpectrumTable compute_spectrum(const CheckedPresentation& cp, CheckedRep& cr, double cutoff) {
  if (cp.p.kind == PresentationKind::RankOne) return rank_one_spectrum(cp, cr, cutoff);
  return flat_spectrum(cp, cr, cutoff);
}

SpectrumTable obtain_spectrum(const CheckedPresentation& cp, CheckedRep& cr, double cutoff,
                              const std::string& cache_dir, std::string& cache_status) {
  if (cache_dir.empty()) {
    cache_status = "disabled";
    return compute_spectrum(cp, cr, cutoff);
  }
  std::filesystem::create_directories(cache_dir);
  std::string key = cache_key(cp.hash, cr.hash, cutoff);
  std::string csv = cache_dir + "/" + key + ".csv";
  std::string side = cache_dir + "/" + key + ".json";
  SpectrumTable st;
  if (load_spectrum_csv(st, csv, side, cp.hash, cr.hash, cutoff)) {
    cache_status = "hit";
    return st;
  }
  st = compute_spectrum(cp, cr, cutoff);
  save_spectrum_csv(st, csv, side, cp.hash, cr.hash);
  cache_status = "miss";
  return st;
}

double default_cutoff(const CheckedPresentation& cp, const CheckedRep& cr, double t_min) {
  int rank = (cp.p.kind == PresentationKind::RankOne)
                 ? std::max<int>(1, static_cast<int>(cr.q_mat.rows()))
                 : cr.rep.rank;
  return heat_cutoff(cp.dim(), rank, t_min, 1e-15);
}

// ---- commands ----

int cmd_validate(const Options& o) {
  Json report = make_report("validate");
  auto l = load_checked(o.pres_path);
  report["presentation"] = {{"path", o.pres_path},
                            {"kind", l.cp.p.kind == PresentationKind::RankOne ? "rank-one" : "flat"},
                            {"dimension", l.cp.dim()},
                            {"hash", l.cp.hash},
                            {"effective", l.cp.effective}};
  std::vector<std::string> human = {
      "presentation: " + o.pres_path,
      fmt("dimension %.0f", double(l.cp.dim())),
  };
  if (l.cp.p.kind == PresentationKind::RankOne) {
    report["presentation"]["isotropy_order"] = l.cp.h_closure.size();
    human.push_back(fmt("isotropy order %.0f", double(l.cp.h_closure.size())));
  } else {
    report["presentation"]["point_group_order"] = l.cp.point_group_order();
    human.push_back(fmt("point group order %.0f", double(l.cp.point_group_order())));
  }
  if (!o.rep_path.empty()) {
    auto cr = load_rep_checked(l.cp, o.rep_path);
    report["representation"] = {{"path", o.rep_path},
                                {"name", cr.rep.name},
                                {"rank", cr.rep.rank},
                                {"relation_residual", cr.relation_residual},
                                {"character_blocks", cr.blocks.size()}};
    human.push_back("representation: " + cr.rep.name +
                    fmt(" (rank %.0f, residual %.1e)", double(cr.rep.rank), cr.relation_residual));
  }
  return finish(o, report, true, human);
}

int cmd_strata(const Options& o) {
  Json report = make_report("strata");
  auto l = load_checked(o.pres_path);
  auto strata = enumerate_strata(l.cp);
  Json rows = Json::array();
  std::vector<std::string> human;
  for (const auto& s : strata) {
    Json r;
    r["id"] = s.id;
    r["dimension"] = s.dimension;
    r["multiplicity"] = s.multiplicity.convert_to<long>();
    r["chi_orb"] = rat_str(s.chi_orb);
    r["class_key"] = s.class_key;
    Json base = Json::array();
    for (const auto& x : s.base_point) base.push_back(rat_str(x));
    r["base_point"] = base;
    rows.push_back(r);
    human.push_back(fmt("stratum %.0f: dim %.0f", double(s.id), double(s.dimension)) +
                    ", multiplicity " + s.multiplicity.str() + ", chi_orb " + rat_str(s.chi_orb));
  }
  report["strata"] = rows;
  report["chi_top"] = rat_str(chi_top_from_strata(strata));
  human.push_back("chi_top " + rat_str(chi_top_from_strata(strata)));
  return finish(o, report, true, human);
}

int cmd_euler_check(const Options& o) {
  Json report = make_report("euler-check");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  auto strata = enumerate_strata(l.cp);
  auto g = gauss_bonnet_check(l.cp, cr, strata);
  Json betti = Json::array();
  for (const auto& b : g.betti) betti.push_back(rat_str(b));
  report["betti"] = betti;
  report["lhs"] = rat_str(g.lhs);
  report["rhs"] = rat_str(g.rhs);
  std::vector<std::string> human = {"lhs " + rat_str(g.lhs) + ", rhs " + rat_str(g.rhs)};
  return finish(o, report, g.equal, human);
}

int cmd_spectrum(const Options& o) {
  Json report = make_report("spectrum");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  double cutoff = o.cutoff > 0 ? o.cutoff : default_cutoff(l.cp, cr, 1.0);
  std::string cache_status;
  SpectrumTable st = obtain_spectrum(l.cp, cr, cutoff, o.cache_dir, cache_status);
  report["cutoff"] = st.cutoff > 0 ? st.cutoff : cutoff;
  report["cache"] = cache_status;
  report["betti"] = st.betti;
  report["shells"] = st.shells.size();
  report["integrality_deviation"] = st.integrality_deviation;
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    save_spectrum_csv(st, o.out_dir + "/spectrum.csv", o.out_dir + "/spectrum.meta.json", l.cp.hash,
                      cr.hash);
    report["csv"] = o.out_dir + "/spectrum.csv";
  }
  std::vector<std::string> human = {fmt("cutoff %.4f, %.0f shells", cutoff, double(st.shells.size())),
                                    fmt("integrality deviation %.2e", st.integrality_deviation),
                                    "cache " + cache_status};
  return finish(o, report, true, human);
}

int cmd_heat_trace(const Options& o) {
  Json report = make_report("heat-trace");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  auto grid = parse_grid(o.t_grid, false);
  double cutoff = o.cutoff > 0 ? o.cutoff : default_cutoff(l.cp, cr, grid.front());
  std::string cache_status;
  SpectrumTable st = obtain_spectrum(l.cp, cr, cutoff, o.cache_dir, cache_status);
  report["cutoff"] = cutoff;
  report["cache"] = cache_status;
  Json rows = Json::array();
  std::vector<std::string> human, csv;
  for (double t : grid) {
    Json r;
    r["t"] = t;
    Json per = Json::array();
    std::string line = fmt("t %.4f:", t);
    std::string csv_line = fmt("%.17g", t);
    for (int q = 0; q < st.degrees; ++q) {
      double v = heat_trace_spectral(st, q, t);
      per.push_back(v);
      line += fmt(" %.12g", v);
      csv_line += fmt(",%.17g", v);
    }
    double super = supertrace_spectral(st, t);
    r["trace_by_degree"] = per;
    r["supertrace"] = super;
    csv_line += fmt(",%.17g", super);
    rows.push_back(r);
    human.push_back(line + fmt("  (supertrace %.12g)", super));
    csv.push_back(csv_line);
  }
  report["rows"] = rows;
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    std::string header = "t";
    for (int q = 0; q < st.degrees; ++q) header += fmt(",degree%.0f", double(q));
    header += ",supertrace";
    write_csv(o.out_dir + "/heat-trace.csv", header, csv);
    report["csv"] = o.out_dir + "/heat-trace.csv";
  }
  return finish(o, report, true, human);
}

int cmd_mckean_singer(const Options& o) {
  Json report = make_report("mckean-singer");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  auto grid = parse_grid(o.t_grid, false);
  double tol = pick_tol(o, 1e-12);
  double cutoff = o.cutoff > 0 ? o.cutoff : default_cutoff(l.cp, cr, grid.front());
  std::string cache_status;
  SpectrumTable st = obtain_spectrum(l.cp, cr, cutoff, o.cache_dir, cache_status);
  auto ms = mckean_singer_check(st, grid);
  report["euler"] = ms.euler;
  report["max_deviation"] = ms.max_deviation;
  report["tolerance"] = tol;
  std::vector<std::string> human = {fmt("euler characteristic %.0f", double(ms.euler)),
                                    fmt("max deviation %.2e (tolerance %.1e)", ms.max_deviation, tol)};
  return finish(o, report, ms.max_deviation <= tol, human);
}

int cmd_torsion(const Options& o) {
  Json report = make_report("torsion");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  TorsionResult tr = (l.cp.p.kind == PresentationKind::RankOne) ? rank_one_torsion(l.cp, cr)
                                                                : flat_torsion(l.cp, cr);
  report["log_torsion"] = tr.log_t;
  report["torsion"] = tr.t;
  report["betti"] = tr.betti;
  Json per = Json::array();
  for (const auto& z : tr.per_degree)
    per.push_back({{"zeta0", z.zeta0}, {"zeta_prime0", z.zeta_prime0}, {"log_det", z.log_det}});
  report["per_degree"] = per;
  std::vector<std::string> human = {fmt("torsion %.12g (log %.12g)", tr.t, tr.log_t)};
  if (l.cp.p.kind == PresentationKind::FlatCrystallographic) {
    auto m = ray_singer_metric(l.cp, cr);
    Json vols = Json::array();
    for (double v : m.log_harmonic_vol) vols.push_back(v);
    report["log_harmonic_volumes"] = vols;
    report["log_metric"] = m.log_metric;
    human.push_back(fmt("determinant line metric: log %.12g", m.log_metric));
  }
  return finish(o, report, true, human);
}

int cmd_anomaly(const Options& o) {
  Json report = make_report("anomaly-scale-check");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  if (l.cp.p.kind != PresentationKind::FlatCrystallographic)
    throw Error(Errc::UnsupportedGroup, "scale anomaly check needs a flat presentation");
  double tol = pick_tol(o, 1e-6);
  auto a = anomaly_scale_check(l.raw, cr.rep);
  report["coefficient_exact"] = rat_str(a.coeff_exact);
  report["chi_exact"] = rat_str(a.chi_exact);
  report["exact_equal"] = a.exact_equal;
  report["numeric_coefficient"] = a.numeric_coeff;
  report["numeric_expected"] = a.numeric_expected;
  report["numeric_deviation"] = a.numeric_deviation;
  report["tolerance"] = tol;
  std::vector<std::string> human = {
      "log c coefficient " + rat_str(a.coeff_exact) + ", euler characteristic " + rat_str(a.chi_exact),
      fmt("torsion slope %.9g, expected %.9g", a.numeric_coeff, a.numeric_expected) +
          fmt(" (deviation %.2e)", a.numeric_deviation)};
  return finish(o, report, a.exact_equal && a.numeric_deviation <= tol, human);
}

int cmd_metric_invariance(const Options& o) {
  Json report = make_report("metric-invariance");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  double tol = pick_tol(o, 1e-6);
  report["tolerance"] = tol;
  std::vector<std::string> human;
  double spread = 0.0;
  if (l.cp.p.kind == PresentationKind::RankOne) {
    SpectrumTable st = rank_one_spectrum(l.cp, cr, 200.0);
    bool acyclic = true;
    for (long b : st.betti)
      if (b != 0) acyclic = false;
    if (!acyclic) throw Error(Errc::KernelMismatch, "metric invariance applies to acyclic bundles");
    Json vals = Json::array();
    for (const Rat& ell : {Rat(1), Rat(2), Rat(3, 2)}) {
      QuotientPresentation p2 = l.raw;
      p2.rank_one.ell = ell;
      auto cp2 = validate_presentation(p2);
      auto cr2 = validate_rep(cp2, cr.rep);
      double lt = rank_one_torsion(cp2, cr2).log_t;
      vals.push_back({{"length", rat_str(ell)}, {"log_torsion", lt}});
      human.push_back("length " + rat_str(ell) + fmt(": log torsion %.12g", lt));
    }
    for (const auto& a : vals)
      for (const auto& b : vals)
        spread = std::max(spread, std::abs(a["log_torsion"].get<double>() -
                                           b["log_torsion"].get<double>()));
    report["lengths"] = vals;
  } else {
    auto betti = betti_exact(l.cp, cr);
    for (const auto& b : betti)
      if (b != 0) throw Error(Errc::KernelMismatch, "metric invariance applies to acyclic bundles");
    std::vector<RatMat> grams;
    const std::size_t n = static_cast<std::size_t>(l.cp.dim());
    for (const Rat& c2 : {Rat(1), Rat(2), Rat(9, 4)}) {
      RatMat g(n, RatVec(n, 0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i][j] = l.raw.metric_gram[i][j] * c2;
      grams.push_back(g);
    }
    auto inv = flat_metric_invariance(l.raw, cr.rep, grams);
    Json vals = Json::array();
    const char* names[] = {"1", "2", "9/4"};
    for (std::size_t i = 0; i < inv.log_t.size(); ++i) {
      vals.push_back({{"scale", names[i]}, {"log_torsion", inv.log_t[i]}});
      human.push_back(std::string("scale ") + names[i] + fmt(": log torsion %.12g", inv.log_t[i]));
    }
    report["scales"] = vals;
    spread = inv.max_deviation;
    if (l.cp.dim() == 1 && cr.rep.rank == 1 && cr.blocks.size() == 1) {
      double theta = 2 * M_PI * cr.blocks[0].mu_d[0];
      std::vector<CircleProfile> profiles = {
          {[](double) { return 1.0; }, "round"},
          {[](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, "bump"},
          {[](double x) { return 1.0 / (1.1 + 0.5 * std::sin(2 * M_PI * x)); }, "wobble"},
      };
      auto pr = profile_invariance_check(profiles, theta, 400);
      Json pv = Json::array();
      for (std::size_t i = 0; i < pr.log_t.size(); ++i) {
        pv.push_back({{"profile", pr.names[i]}, {"log_torsion", pr.log_t[i]}});
        human.push_back("profile " + pr.names[i] + fmt(": log torsion %.12g", pr.log_t[i]));
      }
      report["profiles"] = pv;
      report["profile_spread"] = pr.max_deviation;
      spread = std::max(spread, pr.max_deviation);
    }
  }
  report["max_deviation"] = spread;
  human.push_back(fmt("spread %.2e (tolerance %.1e)", spread, tol));
  return finish(o, report, spread <= tol, human);
}

int cmd_trace_formula(const Options& o) {
  Json report = make_report("trace-formula");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  auto grid = parse_grid(o.t_grid, false);
  double tol = pick_tol(o, 1e-10);
  auto r = selberg_check(l.cp, cr, grid);
  Json rows = Json::array();
  std::vector<std::string> human, csv;
  for (const auto& row : r.rows) {
    rows.push_back({{"degree", row.degree},
                    {"t", row.t},
                    {"spectral", row.spectral},
                    {"geometric", row.geometric},
                    {"deviation", std::abs(row.spectral - row.geometric)}});
    csv.push_back(fmt("%.0f,%.17g", double(row.degree), row.t) +
                  fmt(",%.17g,%.17g", row.spectral, row.geometric));
  }
  report["rows"] = rows;
  report["max_deviation"] = r.max_deviation;
  report["tolerance"] = tol;
  human.push_back(fmt("%.0f rows, max deviation %.2e", double(r.rows.size()), r.max_deviation) +
                  fmt(" (tolerance %.1e)", tol));
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    write_csv(o.out_dir + "/trace-formula.csv", "degree,t,spectral,geometric", csv);
    report["csv"] = o.out_dir + "/trace-formula.csv";
  }
  return finish(o, report, r.max_deviation <= tol, human);
}

int cmd_classes(const Options& o) {
  Json report = make_report("classes");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  Rat lmax = parse_lmax(o.lmax, 10);
  auto tab = class_table(l.cp, cr, lmax, true);
  auto ident = orbital_identity_check(l.cp, cr, lmax);
  Json rows = Json::array();
  std::vector<std::string> csv;
  for (const auto& c : tab.classes) {
    rows.push_back({{"label", c.label},
                    {"elliptic", c.elliptic},
                    {"winding", c.winding},
                    {"length", c.length},
                    {"s", c.s_gamma.convert_to<long>()},
                    {"delta", c.delta_order.convert_to<long>()},
                    {"centralizer", c.centralizer_count.convert_to<long>()},
                    {"weight_euler", rat_str(c.weight_euler)},
                    {"weight_orbital", rat_str(c.weight_orbital)},
                    {"trace_re", c.rho_trace.real()},
                    {"trace_im", c.rho_trace.imag()}});
    csv.push_back(c.label + (c.elliptic ? ",1," : ",0,") + fmt("%.0f,%.17g", double(c.winding), c.length) +
                  "," + rat_str(c.weight_euler) + "," + rat_str(c.weight_orbital) +
                  fmt(",%.17g,%.17g", c.rho_trace.real(), c.rho_trace.imag()));
  }
  report["classes"] = rows;
  report["orbital_identity"] = {{"checked", ident.checked}, {"all_equal", ident.all_equal}};
  std::vector<std::string> human = {
      fmt("%.0f classes out to displacement ", double(tab.classes.size())) + rat_str(lmax),
      fmt("orbital identity on %.0f classes: ", double(ident.checked)) +
          (ident.all_equal ? "exact" : "mismatch")};
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    write_csv(o.out_dir + "/classes.csv",
              "label,elliptic,winding,length,weight_euler,weight_orbital,trace_re,trace_im", csv);
    report["csv"] = o.out_dir + "/classes.csv";
  }
  return finish(o, report, ident.all_equal, human);
}

int cmd_ruelle(const Options& o) {
  Json report = make_report("ruelle");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  auto grid = parse_grid(o.sigma_grid, true);
  Rat lmax = parse_lmax(o.lmax, 24);
  Json rows = Json::array();
  std::vector<std::string> human, csv;
  bool id_one = false, weights = false;
  for (double s : grid) {
    auto rv = ruelle_zeta(l.cp, cr, s, lmax);
    id_one = rv.identically_one;
    weights = rv.weights_vanish;
    rows.push_back({{"sigma", rv.sigma},
                    {"log_value", rv.log_value},
                    {"value", rv.value},
                    {"partial_deviation", rv.partial_deviation}});
    human.push_back(fmt("sigma %.4f: log R %.12g", s, rv.log_value) +
                    fmt(" (truncation deviation %.1e)", rv.partial_deviation));
    csv.push_back(fmt("%.17g,%.17g", s, rv.log_value) + fmt(",%.17g", rv.value));
  }
  report["rows"] = rows;
  report["identically_one"] = id_one;
  report["weights_vanish"] = weights;
  if (id_one) human.push_back("zeta function is identically one (split rank at least two)");
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    write_csv(o.out_dir + "/ruelle.csv", "sigma,log_r,r", csv);
    report["csv"] = o.out_dir + "/ruelle.csv";
  }
  return finish(o, report, true, human);
}

int cmd_fried_check(const Options& o) {
  Json report = make_report("fried-check");
  auto l = load_checked(o.pres_path);
  auto cr = load_rep_checked(l.cp, o.rep_path);
  auto grid = parse_grid(o.sigma_grid, false);
  double tol = pick_tol(o, 1e-6);
  auto fr = fried_check(l.cp, cr, grid);
  report["identically_one"] = fr.identically_one;
  report["weights_vanish"] = fr.weights_vanish;
  std::vector<std::string> human;
  bool pass;
  if (fr.identically_one) {
    pass = fr.weights_vanish;
    human.push_back("zeta identically one; class weights vanish: " +
                    std::string(fr.weights_vanish ? "yes" : "no"));
  } else {
    report["acyclic"] = fr.acyclic;
    report["e_term"] = fr.e_term;
    report["e_term_expected"] = fr.e_term_expected;
    report["e_class_deviation"] = fr.e_class_deviation;
    Json rows = Json::array();
    for (const auto& row : fr.rows)
      rows.push_back({{"sigma", row.sigma},
                      {"log_ruelle", row.log_ruelle},
                      {"log_rhs", row.log_rhs},
                      {"deviation", row.deviation}});
    report["rows"] = rows;
    report["max_functional_deviation"] = fr.max_functional_deviation;
    report["functional_tolerance"] = 1e-8;
    human.push_back(fmt("axis defect E %.12g (class-side deviation %.1e)", fr.e_term_expected,
                        fr.e_class_deviation));
    human.push_back(fmt("functional deviation %.2e (tolerance 1e-8)", fr.max_functional_deviation));
    pass = fr.max_functional_deviation <= 1e-8 && fr.e_class_deviation <= 1e-9;
    if (fr.acyclic) {
      report["log_r0"] = fr.log_r0;
      report["log_t2"] = fr.log_t2;
      report["r0_deviation"] = fr.r0_deviation;
      report["value_tolerance"] = tol;
      human.push_back(fmt("zeta at zero vs squared torsion: deviation %.2e (tolerance %.1e)",
                          fr.r0_deviation, tol));
      pass = pass && fr.r0_deviation <= tol;
    }
  }
  return finish(o, report, pass, human);
}

int cmd_report_all(const Options& o) {
  Json report = make_report("report-all");
  auto results = verification_suite(ORBT_DATA_DIR);
  Json rows = Json::array();
  std::vector<std::string> human;
  bool all_ok = true;
  int index = 0;
  for (const auto& r : results) {
    ++index;
    rows.push_back({{"name", r.name}, {"pass", r.ok}, {"detail", r.detail}});
    char line[256];
    std::snprintf(line, sizeof(line), "%s  %2d  %-34s %s", r.ok ? "PASS" : "FAIL", index,
                  r.name.c_str(), r.detail.c_str());
    human.push_back(line);
    if (!r.ok) all_ok = false;
  }
  report["criteria"] = rows;
  human.push_back(fmt("%.0f of %.0f criteria passed",
                      double(index - std::count_if(results.begin(), results.end(),
                                                   [](const CriterionResult& r) { return !r.ok; })),
                      double(index)));
  return finish(o, report, all_ok, human);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariants of compact quotient orbifolds"};
  app.require_subcommand(1);

  Options o;
  struct Cmd {
    const char* name;
    const char* blurb;
    bool needs_rep;
    int (*run)(const Options&);
  };
  std::vector<Cmd> cmds = {
      {"validate", "check a presentation, and optionally a representation", false, cmd_validate},
      {"strata", "enumerate singular strata with multiplicities", false, cmd_strata},
      {"euler-check", "alternating Betti sum against the point strata", true, cmd_euler_check},
      {"spectrum", "Hodge Laplacian spectrum up to a cutoff", true, cmd_spectrum},
      {"heat-trace", "spectral heat traces over a time grid", true, cmd_heat_trace},
      {"mckean-singer", "constancy of the signed heat trace", true, cmd_mckean_singer},
      {"torsion", "analytic torsion and determinant line metric", true, cmd_torsion},
      {"anomaly-scale-check", "scale anomaly coefficient vs Euler characteristic", true, cmd_anomaly},
      {"metric-invariance", "torsion across metric families (acyclic only)", true,
       cmd_metric_invariance},
      {"trace-formula", "spectral vs geometric heat traces", true, cmd_trace_formula},
      {"classes", "conjugacy class table with orbital weights", true, cmd_classes},
      {"ruelle", "dynamical zeta function on a sigma grid", true, cmd_ruelle},
      {"fried-check", "dynamical zeta against torsion and determinants", true, cmd_fried_check},
      {"report-all", "full verification suite over the bundled corpus", false, cmd_report_all},
  };

  std::map<std::string, const Cmd*> dispatch;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.blurb);
    if (std::string(c.name) != "report-all") {
      sub->add_option("presentation", o.pres_path, "presentation file")->required();
      if (c.needs_rep)
        sub->add_option("representation", o.rep_path, "representation file")->required();
      else
        sub->add_option("representation", o.rep_path, "representation file");
    }
    sub->add_option("--tol", o.tol, "tolerance override");
    sub->add_option("--cutoff", o.cutoff, "eigenvalue cutoff");
    sub->add_option("--lmax", o.lmax, "maximal displacement");
    sub->add_option("--t-grid", o.t_grid, "comma separated times");
    sub->add_option("--sigma-grid", o.sigma_grid, "comma separated shifts");
    sub->add_option("--out", o.out_dir, "artifact directory");
    sub->add_option("--cache", o.cache_dir, "spectrum cache directory");
    sub->add_flag("--json", o.json, "JSON report on stdout");
    dispatch[c.name] = &c;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  const Cmd* chosen = dispatch.at(app.get_subcommands().front()->get_name());
  try {
    return chosen->run(o);
  } catch (const Error& e) {
    Json diag;
    diag["command"] = chosen->name;
    diag["error"] = errc_name(e.code());
    diag["message"] = e.what();
    if (o.json)
      std::cout << diag.dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    if (o.json)
      std::cout << Json{{"command", chosen->name}, {"error", "BadInput"}, {"message", e.what()}}.dump(2)
                << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
