#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "orbt/locsym.hpp"
#include "orbt/ruelle.hpp"

using namespace orbt;

TEST_CASE("circle class table lists windings with Euler weights") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-trivial.rep");
  auto tab = lattice_class_table(cp, cr, Rat(3), true);
  REQUIRE(tab.classes.size() == 7);  // e and windings +-1, +-2, +-3
  CHECK(tab.classes[0].elliptic);
  for (const auto& c : tab.classes) {
    if (c.elliptic) continue;
    long k = std::labs(c.winding);
    CHECK(c.weight_euler == Rat(1, k));
    CHECK(c.weight_orbital == Rat(1, k));
    CHECK(std::abs(c.length - static_cast<double>(k)) < 1e-12);
  }
}

TEST_CASE("class tables reject nontrivial point groups") {
  auto cp = corpus::presentation("pillowcase.cfg");
  auto cr = corpus::rep(cp, "pillow-trivial.rep");
  CHECK_THROWS_AS(lattice_class_table(cp, cr, Rat(3)), Error);
}

TEST_CASE("orbital identity holds across the corpus") {
  SECTION("circle") {
    auto cp = corpus::presentation("circle.cfg");
    auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
    auto r = orbital_identity_check(cp, cr, Rat(10));
    CHECK(r.all_equal);
    CHECK(r.checked == 20);
  }
  SECTION("square torus") {
    auto cp = corpus::presentation("torus2.cfg");
    auto cr = corpus::rep(cp, "torus2-trivial.rep");
    auto r = orbital_identity_check(cp, cr, Rat(10));
    CHECK(r.all_equal);
    CHECK(r.checked > 300);
    for (const auto& row : r.rows) CHECK(row.lhs == 0);
  }
  SECTION("cubic torus") {
    auto cp = corpus::presentation("torus3.cfg");
    auto cr = corpus::rep(cp, "torus3-twist.rep");
    auto r = orbital_identity_check(cp, cr, Rat(6));
    CHECK(r.all_equal);
  }
  SECTION("rank one") {
    auto cp = corpus::presentation("rankone-z2.cfg");
    auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
    auto r = orbital_identity_check(cp, cr, Rat(10));
    CHECK(r.all_equal);
    CHECK(r.checked > 0);
  }
}

TEST_CASE("rank-one class sums collapse to power traces") {
  auto cp = corpus::presentation("rankone-z2.cfg");
  auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
  for (long n = -4; n <= 4; ++n) {
    Cplx lhs = rank_one_class_side(cp, cr, n);
    Cplx rhs = rank_one_q_power_trace(cr, n);
    INFO("winding " << n);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }

  auto plain = corpus::presentation("rankone-plain.cfg");
  auto pq = corpus::rep(plain, "rankone-plain-quarter.rep");
  for (long n = 0; n <= 4; ++n) {
    Cplx lhs = rank_one_class_side(plain, pq, n);
    Cplx rhs = rank_one_q_power_trace(pq, n);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("heat trace identities") {
  const std::vector<double> grid = {0.1, 0.35, 1.0};

  SECTION("circle, trivial and twisted") {
    auto cp = corpus::presentation("circle.cfg");
    for (const char* name : {"circle-trivial.rep", "circle-theta-2pi3.rep"}) {
      auto cr = corpus::rep(cp, name);
      auto r = selberg_check(cp, cr, grid);
      INFO(name);
      CHECK(r.max_deviation < 1e-10);
    }
  }
  SECTION("square torus") {
    auto cp = corpus::presentation("torus2.cfg");
    auto cr = corpus::rep(cp, "torus2-trivial.rep");
    auto r = selberg_check(cp, cr, grid);
    CHECK(r.max_deviation < 1e-10);
  }
  SECTION("cubic torus with twist") {
    auto cp = corpus::presentation("torus3.cfg");
    auto cr = corpus::rep(cp, "torus3-twist.rep");
    auto r = selberg_check(cp, cr, grid);
    CHECK(r.max_deviation < 1e-10);
  }
  SECTION("rank one") {
    auto cp = corpus::presentation("rankone-z2.cfg");
    auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
    auto r = selberg_check(cp, cr, grid);
    CHECK(r.max_deviation < 1e-10);
  }
}

TEST_CASE("dynamical zeta closed form matches the truncated product") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
  auto rv = ruelle_zeta(cp, cr, 1.0);
  CHECK(!rv.identically_one);
  CHECK(rv.partial_deviation < 1e-9);
  double expect = std::norm(1.0 - std::polar(std::exp(-1.0), 2 * M_PI / 3));
  CHECK(std::abs(rv.value - expect) < 1e-12);
}

TEST_CASE("zeta value at zero against the squared torsion") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-pi.rep");
  auto fr = fried_check(cp, cr, {0.25, 0.5, 1.0, 2.0});
  CHECK(!fr.identically_one);
  CHECK(fr.acyclic);
  CHECK(std::abs(fr.e_term_expected - 1.0) < 1e-12);
  CHECK(fr.e_class_deviation < 1e-12);
  CHECK(std::abs(std::exp(fr.log_r0) - 4.0) < 1e-6);
  CHECK(fr.r0_deviation < 1e-6);
  CHECK(fr.max_functional_deviation < 1e-8);
}

TEST_CASE("functional equation with nonzero axis defect") {
  auto cp = corpus::presentation("rankone-z2.cfg");
  auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
  auto fr = fried_check(cp, cr, {0.25, 0.5, 1.0, 2.0});
  CHECK(fr.acyclic);
  CHECK(std::abs(fr.e_term - 1.0) < 1e-12);
  CHECK(fr.e_class_deviation < 1e-12);
  CHECK(fr.max_functional_deviation < 1e-8);
  CHECK(fr.r0_deviation < 1e-6);
}

TEST_CASE("higher rank zeta is identically one") {
  auto cp = corpus::presentation("torus3.cfg");
  auto cr = corpus::rep(cp, "torus3-twist.rep");
  auto rv = ruelle_zeta(cp, cr, 0.7, Rat(4));
  CHECK(rv.identically_one);
  CHECK(rv.weights_vanish);
  CHECK(rv.value == 1.0);
  auto fr = fried_check(cp, cr, {0.5});
  CHECK(fr.identically_one);
  CHECK(fr.weights_vanish);
}
