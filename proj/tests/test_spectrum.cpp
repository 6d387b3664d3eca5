#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "orbt/heat.hpp"
#include "orbt/spectrum.hpp"

using namespace orbt;

TEST_CASE("circle spectra match closed forms") {
  auto cp = corpus::presentation("circle.cfg");

  SECTION("trivial character") {
    auto cr = corpus::rep(cp, "circle-trivial.rep");
    auto st = flat_spectrum(cp, cr, 300.0);
    REQUIRE(st.betti.size() == 2);
    CHECK(st.betti[0] == 1);
    CHECK(st.betti[1] == 1);
    // lambda_n = 4 pi^2 n^2, multiplicity 2 in each degree for n >= 1.
    REQUIRE(!st.shells.empty());
    CHECK(st.shells[0].lambda == 0.0);
    bool found = false;
    for (const auto& sh : st.shells) {
      if (std::abs(sh.lambda - 4 * M_PI * M_PI) < 1e-9) {
        found = true;
        CHECK(sh.mult[0] == 2);
        CHECK(sh.mult[1] == 2);
      }
    }
    CHECK(found);
  }

  SECTION("half twist") {
    auto cr = corpus::rep(cp, "circle-theta-pi.rep");
    auto st = flat_spectrum(cp, cr, 300.0);
    CHECK(st.betti[0] == 0);
    CHECK(st.betti[1] == 0);
    double lam0 = 4 * M_PI * M_PI * 0.25;
    REQUIRE(!st.shells.empty());
    CHECK(std::abs(st.shells.front().lambda - lam0) < 1e-9);
    CHECK(st.shells.front().mult[0] == 2);
  }
}

TEST_CASE("pillowcase Betti numbers") {
  auto cp = corpus::presentation("pillowcase.cfg");
  auto triv = corpus::rep(cp, "pillow-trivial.rep");
  auto bt = betti_exact(cp, triv);
  REQUIRE(bt.size() == 3);
  CHECK(bt[0] == 1);
  CHECK(bt[1] == 0);
  CHECK(bt[2] == 1);

  auto half = corpus::rep(cp, "pillow-halfchar.rep");
  auto bh = betti_exact(cp, half);
  CHECK(bh[0] == 0);
  CHECK(bh[1] == 0);
  CHECK(bh[2] == 0);

  auto sgn = corpus::rep(cp, "pillow-sigma-sign.rep");
  auto bs = betti_exact(cp, sgn);
  CHECK(bs[0] == 0);
  CHECK(bs[1] == 2);
  CHECK(bs[2] == 0);
}

TEST_CASE("multiplicities land on integers") {
  auto pillow = corpus::presentation("pillowcase.cfg");
  for (const char* name :
       {"pillow-trivial.rep", "pillow-halfchar.rep", "pillow-sigma-sign.rep"}) {
    auto cr = corpus::rep(pillow, name);
    auto st = flat_spectrum(pillow, cr, 260.0);
    INFO(name);
    CHECK(st.integrality_deviation <= 1e-9);
    for (const auto& sh : st.shells)
      for (std::size_t q = 0; q < sh.mult.size(); ++q) CHECK(sh.mult[q] >= 0);
  }
  auto t3z2 = corpus::presentation("torus3-z2.cfg");
  auto cr = corpus::rep(t3z2, "torus3-z2-trivial.rep");
  auto st = flat_spectrum(t3z2, cr, 180.0);
  CHECK(st.integrality_deviation <= 1e-9);
}

TEST_CASE("supertrace of the heat kernel is constant in t") {
  const std::vector<double> grid = {0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0};

  auto pillow = corpus::presentation("pillowcase.cfg");
  auto triv = corpus::rep(pillow, "pillow-trivial.rep");
  auto ms = mckean_singer_check(flat_spectrum(pillow, triv, 800.0), grid);
  CHECK(ms.euler == 2);
  CHECK(ms.max_deviation <= 1e-12);

  auto torus = corpus::presentation("torus2.cfg");
  auto t2 = corpus::rep(torus, "torus2-trivial.rep");
  auto ms2 = mckean_singer_check(flat_spectrum(torus, t2, 800.0), grid);
  CHECK(ms2.euler == 0);
  CHECK(ms2.max_deviation <= 1e-12);
}

TEST_CASE("rank-one spectrum enumerates twisted circle modes") {
  auto cp = corpus::presentation("rankone-z2.cfg");
  auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
  auto st = rank_one_spectrum(cp, cr, 400.0);
  CHECK(st.betti[0] == 0);
  CHECK(st.betti[1] == 0);
  // Invariant line carries Q = e^{2 pi i/5}: lambda = 4 pi^2 (n + 1/5)^2.
  double lam = 4 * M_PI * M_PI / 25.0;
  REQUIRE(!st.shells.empty());
  CHECK(std::abs(st.shells.front().lambda - lam) < 1e-9);
  CHECK(st.shells.front().mult[0] == 1);
  CHECK(st.shells.front().mult[1] == 1);
}
