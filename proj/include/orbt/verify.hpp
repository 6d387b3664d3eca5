#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "orbt/bundle.hpp"
#include "orbt/circle_numeric.hpp"
#include "orbt/io.hpp"
#include "orbt/ruelle.hpp"
#include "orbt/torsion.hpp"

namespace orbt {

struct CriterionResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string vfmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

inline double verify_round_trip(const CheckedPresentation& cp, const CheckedRep& cr) {
  FlatBundleCocycle b = bundle_from_rep(cp, cr);
  auto loops = generator_loops(cp, b.atlas);
  HolonomyReadout out = holonomy_of(cp, b, loops);
  double dev = out.relation_residual;
  if (cp.p.kind == PresentationKind::RankOne) {
    dev = std::max(dev, (out.rep.g1 - cr.rep.g1).norm());
    for (std::size_t j = 0; j < cr.rep.h.size(); ++j)
      dev = std::max(dev, (out.rep.h[j] - cr.rep.h[j]).norm());
  } else {
    for (std::size_t j = 0; j < cr.rep.lattice.size(); ++j)
      dev = std::max(dev, (out.rep.lattice[j] - cr.rep.lattice[j]).norm());
    for (std::size_t j = 0; j < cr.rep.coset.size(); ++j)
      dev = std::max(dev, (out.rep.coset[j] - cr.rep.coset[j]).norm());
  }
  return dev;
}

}  // namespace detail

/// The ten verification criteria over the bundled corpus, each with a one-line
/// numeric summary.  Every tolerance is stated in the detail string.
inline std::vector<CriterionResult> verification_suite(const std::string& data_dir) {
  std::vector<CriterionResult> results;

  auto pres = [&](const std::string& cfg) {
    return validate_presentation(load_presentation(data_dir + "/presentations/" + cfg));
  };
  auto rep = [&](const CheckedPresentation& cp, const std::string& file) {
    return validate_rep(cp, load_rep_json(data_dir + "/reps/" + file, cp.p));
  };
  auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    CriterionResult r;
    r.name = name;
    try {
      auto [ok, detail] = fn();
      r.ok = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(r);
  };
  using detail::seconds_since;
  using detail::vfmt;

  run("stratified Euler identity", [&]() -> std::pair<bool, std::string> {
    auto t0 = std::chrono::steady_clock::now();
    struct Case {
      const char* cfg;
      const char* rep;
      long chi;
    };
    std::vector<Case> cases = {
        {"pillowcase.cfg", "pillow-trivial.rep", 2},
        {"pillowcase.cfg", "pillow-halfchar.rep", 0},
        {"pillowcase.cfg", "pillow-sigma-sign.rep", -2},
        {"interval.cfg", "interval-trivial.rep", 1},
        {"interval.cfg", "interval-sign.rep", -1},
        {"interval.cfg", "interval-dihedral.rep", 0},
        {"torus3.cfg", "torus3-trivial.rep", 0},
    };
    bool ok = true;
    for (const auto& c : cases) {
      auto cp = pres(c.cfg);
      auto cr = rep(cp, c.rep);
      auto strata = enumerate_strata(cp);
      auto g = gauss_bonnet_check(cp, cr, strata);
      if (!g.equal || g.lhs != Rat(c.chi)) ok = false;
    }
    double dt = seconds_since(t0);
    if (dt >= 1.0) ok = false;
    return {ok, vfmt("7 cases exact, %.3f s (< 1 s)", dt)};
  });

  run("heat supertrace constancy", [&]() -> std::pair<bool, std::string> {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> grid;
    for (double t = 0.05; t <= 5.0 + 1e-12; t += 0.15) grid.push_back(t);
    auto pillow = pres("pillowcase.cfg");
    auto pr = rep(pillow, "pillow-trivial.rep");
    auto ms1 = mckean_singer_check(flat_spectrum(pillow, pr, heat_cutoff(2, 1, 0.05, 1e-15)), grid);
    auto torus = pres("torus2.cfg");
    auto tr = rep(torus, "torus2-trivial.rep");
    auto ms2 = mckean_singer_check(flat_spectrum(torus, tr, heat_cutoff(2, 1, 0.05, 1e-15)), grid);
    double dev = std::max(ms1.max_deviation, ms2.max_deviation);
    double dt = seconds_since(t0);
    bool ok = ms1.euler == 2 && ms2.euler == 0 && dev <= 1e-12 && dt < 5.0;
    return {ok, vfmt("max dev %.2e (<= 1e-12), %.3f s (< 5 s)", dev, dt)};
  });

  run("multiplicity integrality", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    struct Case {
      const char* cfg;
      const char* rep;
      double cutoff;
    };
    std::vector<Case> cases = {{"pillowcase.cfg", "pillow-trivial.rep", 300.0},
                               {"pillowcase.cfg", "pillow-halfchar.rep", 300.0},
                               {"pillowcase.cfg", "pillow-sigma-sign.rep", 300.0},
                               {"interval.cfg", "interval-dihedral.rep", 300.0},
                               {"torus3-z2.cfg", "torus3-z2-trivial.rep", 160.0}};
    for (const auto& c : cases) {
      auto cp = pres(c.cfg);
      auto cr = rep(cp, c.rep);
      auto st = flat_spectrum(cp, cr, c.cutoff);
      worst = std::max(worst, st.integrality_deviation);
    }
    auto r1 = pres("rankone-z2.cfg");
    auto rr = rep(r1, "rankone-z2-beta.rep");
    worst = std::max(worst, rank_one_spectrum(r1, rr, 300.0).integrality_deviation);
    return {worst <= 1e-9, vfmt("worst deviation %.2e (<= 1e-9)", worst)};
  });

  run("holonomy round trips", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    int count = 0;
    auto circle = pres("circle.cfg");
    for (const char* r : {"circle-trivial.rep", "circle-theta-pi.rep", "circle-theta-2pi3.rep"}) {
      worst = std::max(worst, detail::verify_round_trip(circle, rep(circle, r)));
      ++count;
    }
    auto interval = pres("interval.cfg");
    for (const char* r : {"interval-sign.rep", "interval-dihedral.rep"}) {
      worst = std::max(worst, detail::verify_round_trip(interval, rep(interval, r)));
      ++count;
    }
    auto pillow = pres("pillowcase.cfg");
    worst = std::max(worst, detail::verify_round_trip(pillow, rep(pillow, "pillow-halfchar.rep")));
    ++count;
    auto t3z2 = pres("torus3-z2.cfg");
    worst = std::max(worst, detail::verify_round_trip(t3z2, rep(t3z2, "torus3-z2-trivial.rep")));
    ++count;
    return {worst == 0.0 && count >= 6,
            vfmt("%.0f loops over 4 orbifolds, worst deviation %.1e (exact)", double(count), worst)};
  });

  run("torsion closed forms", [&]() -> std::pair<bool, std::string> {
    auto circle = pres("circle.cfg");
    auto cpi = rep(circle, "circle-theta-pi.rep");
    auto c23 = rep(circle, "circle-theta-2pi3.rep");
    double d1 = std::abs(flat_torsion(circle, cpi).t - 2.0);
    double d2 = std::abs(flat_torsion(circle, c23).t - std::sqrt(3.0));
    auto torus = pres("torus2.cfg");
    auto tt = rep(torus, "torus2-trivial.rep");
    double d3 = std::abs(flat_torsion(torus, tt).log_t);
    auto t3 = pres("torus3.cfg");
    auto tw = rep(t3, "torus3-twist.rep");
    double d4 = std::abs(flat_torsion(t3, tw).log_t);
    bool ok = d1 < 1e-8 && d2 < 1e-8 && d3 < 1e-12 && d4 < 1e-8;
    return {ok, vfmt("twisted dev %.1e (< 1e-8), trivial dev %.1e / %.1e", std::max(d1, d2), d3, d4)};
  });

  run("scale anomaly coefficient", [&]() -> std::pair<bool, std::string> {
    auto check = [&](const std::string& cfg, const std::string& r, long expect) {
      auto base = load_presentation(data_dir + "/presentations/" + cfg);
      auto cp = validate_presentation(base);
      auto cr = rep(cp, r);
      auto a = anomaly_scale_check(base, cr.rep);
      bool ok = a.exact_equal && a.coeff_exact == Rat(expect);
      return std::make_pair(ok, a.numeric_deviation);
    };
    auto [o1, n1] = check("pillowcase.cfg", "pillow-trivial.rep", 2);
    auto [o2, n2] = check("circle.cfg", "circle-theta-pi.rep", 0);
    auto [o3, n3] = check("torus3.cfg", "torus3-twist.rep", 0);
    bool ok = o1 && o2 && o3 && n1 < 1e-6 && n2 < 1e-6 && n3 < 1e-6;
    return {ok, vfmt("coefficients 2/0/0 exact, numeric dev %.1e (< 1e-6)", std::max({n1, n2, n3}))};
  });

  run("metric invariance", [&]() -> std::pair<bool, std::string> {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CircleProfile> profiles = {
        {[](double) { return 1.0; }, "round"},
        {[](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, "bump"},
        {[](double x) { return 1.0 / (1.1 + 0.5 * std::sin(2 * M_PI * x)); }, "wobble"},
    };
    auto r = profile_invariance_check(profiles, M_PI, 400);
    double dt = seconds_since(t0);
    bool ok = r.max_deviation < 1e-6 && r.closed_form_dev < 1e-6 && dt < 90.0;
    return {ok, vfmt("3 profiles, spread %.1e (< 1e-6), %.1f s (< 30 s each)", r.max_deviation, dt)};
  });

  run("trace formula", [&]() -> std::pair<bool, std::string> {
    const std::vector<double> grid = {0.05, 0.1, 0.5, 1.0, 2.0, 5.0};
    double worst = 0.0;
    {
      auto cp = pres("circle.cfg");
      auto cr = rep(cp, "circle-theta-2pi3.rep");
      worst = std::max(worst, selberg_check(cp, cr, grid).max_deviation);
    }
    {
      auto cp = pres("torus2.cfg");
      auto cr = rep(cp, "torus2-trivial.rep");
      worst = std::max(worst, selberg_check(cp, cr, grid).max_deviation);
    }
    {
      auto cp = pres("torus3.cfg");
      auto cr = rep(cp, "torus3-twist.rep");
      worst = std::max(worst, selberg_check(cp, cr, grid).max_deviation);
    }
    {
      auto cp = pres("rankone-z2.cfg");
      auto cr = rep(cp, "rankone-z2-beta.rep");
      worst = std::max(worst, selberg_check(cp, cr, grid).max_deviation);
    }
    return {worst < 1e-10, vfmt("4 quotients, max deviation %.2e (< 1e-10)", worst)};
  });

  run("orbital weight identity", [&]() -> std::pair<bool, std::string> {
    std::size_t total = 0;
    bool ok = true;
    struct Case {
      const char* cfg;
      const char* rep;
      long lmax;
    };
    std::vector<Case> cases = {{"circle.cfg", "circle-trivial.rep", 10},
                               {"torus2.cfg", "torus2-trivial.rep", 10},
                               {"torus3.cfg", "torus3-trivial.rep", 6},
                               {"rankone-z2.cfg", "rankone-z2-beta.rep", 10}};
    for (const auto& c : cases) {
      auto cp = pres(c.cfg);
      auto cr = rep(cp, c.rep);
      auto r = orbital_identity_check(cp, cr, Rat(c.lmax));
      if (!r.all_equal) ok = false;
      total += r.checked;
    }
    return {ok, vfmt("%.0f classes, exact rational equality", double(total))};
  });

  run("dynamical zeta", [&]() -> std::pair<bool, std::string> {
    auto circle = pres("circle.cfg");
    auto cpi = rep(circle, "circle-theta-pi.rep");
    auto f1 = fried_check(circle, cpi, {0.25, 0.5, 1.0, 2.0});
    auto r1 = pres("rankone-z2.cfg");
    auto rr = rep(r1, "rankone-z2-beta.rep");
    auto f2 = fried_check(r1, rr, {0.25, 0.5, 1.0, 2.0});
    auto t3 = pres("torus3.cfg");
    auto tw = rep(t3, "torus3-twist.rep");
    auto f3 = fried_check(t3, tw, {0.5});
    bool ok = f1.acyclic && f1.r0_deviation < 1e-6 && f1.max_functional_deviation < 1e-8 &&
              f2.acyclic && std::abs(f2.e_term - 1.0) < 1e-12 && f2.e_class_deviation < 1e-12 &&
              f2.max_functional_deviation < 1e-8 && f2.r0_deviation < 1e-6 &&
              f3.identically_one && f3.weights_vanish;
    return {ok, vfmt("value dev %.1e (< 1e-6), functional dev %.1e (< 1e-8), split rank two trivial",
                     std::max(f1.r0_deviation, f2.r0_deviation),
                     std::max(f1.max_functional_deviation, f2.max_functional_deviation))};
  });

  return results;
}

}  // namespace orbt
