#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "orbt/torsion.hpp"

using namespace orbt;

TEST_CASE("twisted circle torsion matches the closed form") {
  auto cp = corpus::presentation("circle.cfg");

  SECTION("theta = pi") {
    auto cr = corpus::rep(cp, "circle-theta-pi.rep");
    auto tr = flat_torsion(cp, cr);
    CHECK(tr.betti[0] == 0);
    CHECK(tr.betti[1] == 0);
    CHECK(std::abs(tr.t - 2.0) < 1e-8);
  }

  SECTION("theta = 2 pi / 3") {
    auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
    auto tr = flat_torsion(cp, cr);
    CHECK(std::abs(tr.t - std::sqrt(3.0)) < 1e-8);
  }

  SECTION("trivial character, unit length") {
    auto cr = corpus::rep(cp, "circle-trivial.rep");
    auto tr = flat_torsion(cp, cr);
    // det' Delta = ell^2 = 1, and the q-weighted combination gives T = ell.
    CHECK(std::abs(tr.per_degree[1].log_det - 0.0) < 1e-10);
    CHECK(std::abs(tr.log_t - 0.0) < 1e-10);
  }
}

TEST_CASE("trivial torsion on even and odd tori") {
  auto t2 = corpus::presentation("torus2.cfg");
  auto r2 = corpus::rep(t2, "torus2-trivial.rep");
  auto tr2 = flat_torsion(t2, r2);
  CHECK(std::abs(tr2.log_t) < 1e-12);

  auto t3 = corpus::presentation("torus3.cfg");
  auto r3 = corpus::rep(t3, "torus3-twist.rep");
  auto tr3 = flat_torsion(t3, r3);
  CHECK(tr3.betti[0] == 0);
  CHECK(tr3.betti[1] == 0);
  CHECK(std::abs(tr3.log_t) < 1e-8);
}

TEST_CASE("shifted determinant matches 2(cosh sigma - cos theta)") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
  double cutoff = heat_cutoff(1, 1, 1.0, 1e-16);
  auto st = flat_spectrum(cp, cr, cutoff);
  FlatHeatEvaluator ev(cp, cr);
  ZetaInput in = flat_zeta_input(ev, st, 0);
  double theta = 2 * M_PI / 3;
  for (double sigma : {0.3, 1.0, 2.5}) {
    double expect = std::log(2.0 * (std::cosh(sigma) - std::cos(theta)));
    CHECK(std::abs(log_det_shifted(in, sigma) - expect) < 1e-10);
  }
}

TEST_CASE("torsion is metric independent for acyclic characters") {
  auto base = load_presentation(corpus::pres_path("circle.cfg"));
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-pi.rep");
  std::vector<RatMat> grams = {{{Rat(1)}}, {{Rat(4)}}, {{Rat(9, 4)}}};
  auto inv = flat_metric_invariance(base, cr.rep, grams);
  REQUIRE(inv.log_t.size() == 3);
  CHECK(inv.max_deviation < 1e-6);
  CHECK(std::abs(inv.log_t[0] - std::log(2.0)) < 1e-8);
}

TEST_CASE("scale anomaly coefficient equals the Euler characteristic") {
  auto pillow = load_presentation(corpus::pres_path("pillowcase.cfg"));
  auto pr = corpus::rep(corpus::presentation("pillowcase.cfg"), "pillow-trivial.rep");
  auto a1 = anomaly_scale_check(pillow, pr.rep);
  CHECK(a1.coeff_exact == Rat(2));
  CHECK(a1.exact_equal);
  CHECK(a1.numeric_deviation < 1e-6);

  auto circle = load_presentation(corpus::pres_path("circle.cfg"));
  auto crp = corpus::rep(corpus::presentation("circle.cfg"), "circle-theta-pi.rep");
  auto a2 = anomaly_scale_check(circle, crp.rep);
  CHECK(a2.coeff_exact == Rat(0));
  CHECK(a2.exact_equal);
  CHECK(a2.numeric_deviation < 1e-8);

  auto t3 = load_presentation(corpus::pres_path("torus3.cfg"));
  auto t3r = corpus::rep(corpus::presentation("torus3.cfg"), "torus3-twist.rep");
  auto a3 = anomaly_scale_check(t3, t3r.rep);
  CHECK(a3.coeff_exact == Rat(0));
  CHECK(a3.exact_equal);
  CHECK(a3.numeric_deviation < 1e-8);
}

TEST_CASE("Ray-Singer metric combines torsion and harmonic volumes") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-trivial.rep");
  auto m = ray_singer_metric(cp, cr);
  CHECK(m.betti[0] == 1);
  CHECK(m.betti[1] == 1);
  // vol(H^0) = sqrt(ell), vol(H^1) = sqrt(1/ell): both 1 at unit length.
  CHECK(std::abs(m.log_harmonic_vol[0]) < 1e-12);
  CHECK(std::abs(m.log_harmonic_vol[1]) < 1e-12);
  CHECK(std::abs(m.log_metric - m.log_t) < 1e-12);

  auto pillow = corpus::presentation("pillowcase.cfg");
  auto pr = corpus::rep(pillow, "pillow-trivial.rep");
  auto mp = ray_singer_metric(pillow, pr);
  CHECK(mp.betti[0] == 1);
  CHECK(mp.betti[2] == 1);
  CHECK(std::isfinite(mp.log_metric));
}

TEST_CASE("rank-one torsion matches the invariant character") {
  auto cp = corpus::presentation("rankone-z2.cfg");
  auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
  auto tr = rank_one_torsion(cp, cr);
  // T = |2 sin(pi/5)| from the surviving character e^{2 pi i/5}.
  CHECK(std::abs(tr.t - 2.0 * std::sin(M_PI / 5)) < 1e-8);
}
