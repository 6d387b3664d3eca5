#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "orbt/euler.hpp"
#include "orbt/strata.hpp"

using namespace orbt;

TEST_CASE("presentation files validate") {
  auto circle = corpus::presentation("circle.cfg");
  CHECK(circle.p.dimension == 1);
  CHECK(circle.point_group_order() == 1);
  CHECK(circle.effective);

  auto interval = corpus::presentation("interval.cfg");
  CHECK(interval.point_group_order() == 2);

  auto pillow = corpus::presentation("pillowcase.cfg");
  CHECK(pillow.p.dimension == 2);
  CHECK(pillow.point_group_order() == 2);

  auto t3z2 = corpus::presentation("torus3-z2.cfg");
  CHECK(t3z2.point_group_order() == 2);

  auto r1 = corpus::presentation("rankone-z2.cfg");
  CHECK(r1.h_closure.size() == 2);
  CHECK(r1.h_inv[1] == 1);
  CHECK(r1.u0_conj[1] == 1);
}

TEST_CASE("rotation incompatible with anisotropic metric is rejected") {
  QuotientPresentation p;
  p.kind = PresentationKind::FlatCrystallographic;
  p.dimension = 2;
  p.lattice_basis = {{1, 0}, {0, 1}};
  p.metric_gram = {{1, 0}, {0, 2}};
  AffineElement id = affine_identity(2);
  AffineElement rot;
  rot.A = {{0, -1}, {1, 0}};
  rot.v = {Rat(0), Rat(0)};
  p.elements = {id, rot};
  CHECK_THROWS_AS(validate_presentation(p), Error);
  try {
    validate_presentation(p);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonOrthogonalAction);
  }
}

TEST_CASE("pillowcase strata") {
  auto cp = corpus::presentation("pillowcase.cfg");
  auto strata = enumerate_strata(cp);
  REQUIRE(strata.size() == 5);
  CHECK(strata[0].dimension == 2);
  CHECK(strata[0].multiplicity == 1);
  CHECK(strata[0].chi_orb == 0);
  int points = 0;
  for (std::size_t i = 1; i < strata.size(); ++i) {
    CHECK(strata[i].dimension == 0);
    CHECK(strata[i].multiplicity == 2);
    CHECK(strata[i].chi_orb == 1);
    ++points;
  }
  CHECK(points == 4);
  CHECK(chi_top_from_strata(strata) == Rat(2));
}

TEST_CASE("mirrored interval strata") {
  auto cp = corpus::presentation("interval.cfg");
  auto strata = enumerate_strata(cp);
  REQUIRE(strata.size() == 3);
  CHECK(strata[0].dimension == 1);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(strata[i].dimension == 0);
    CHECK(strata[i].multiplicity == 2);
  }
  CHECK(chi_top_from_strata(strata) == Rat(1));
}

TEST_CASE("free involution quotient has no singular strata") {
  auto cp = corpus::presentation("torus3-z2.cfg");
  auto strata = enumerate_strata(cp);
  REQUIRE(strata.size() == 1);
  CHECK(strata[0].dimension == 3);
  CHECK(chi_top_from_strata(strata) == Rat(0));
}

TEST_CASE("gauss-bonnet on the corpus") {
  auto pillow = corpus::presentation("pillowcase.cfg");
  auto strata = enumerate_strata(pillow);

  auto trivial = corpus::rep(pillow, "pillow-trivial.rep");
  auto g1 = gauss_bonnet_check(pillow, trivial, strata);
  CHECK(g1.equal);
  CHECK(g1.lhs == Rat(2));
  CHECK(g1.rhs == Rat(2));

  auto half = corpus::rep(pillow, "pillow-halfchar.rep");
  auto g2 = gauss_bonnet_check(pillow, half, strata);
  CHECK(g2.equal);
  CHECK(g2.lhs == Rat(0));

  auto ssign = corpus::rep(pillow, "pillow-sigma-sign.rep");
  auto g3 = gauss_bonnet_check(pillow, ssign, strata);
  CHECK(g3.equal);
  CHECK(g3.lhs == Rat(-2));

  auto interval = corpus::presentation("interval.cfg");
  auto istrata = enumerate_strata(interval);
  auto itriv = corpus::rep(interval, "interval-trivial.rep");
  auto ig = gauss_bonnet_check(interval, itriv, istrata);
  CHECK(ig.equal);
  CHECK(ig.lhs == Rat(1));

  auto isign = corpus::rep(interval, "interval-sign.rep");
  auto ig2 = gauss_bonnet_check(interval, isign, istrata);
  CHECK(ig2.equal);
  CHECK(ig2.lhs == Rat(-1));

  auto idih = corpus::rep(interval, "interval-dihedral.rep");
  auto ig3 = gauss_bonnet_check(interval, idih, istrata);
  CHECK(ig3.equal);
  CHECK(ig3.lhs == Rat(0));

  auto t3 = corpus::presentation("torus3.cfg");
  auto tstrata = enumerate_strata(t3);
  auto ttriv = corpus::rep(t3, "torus3-trivial.rep");
  auto tg = gauss_bonnet_check(t3, ttriv, tstrata);
  CHECK(tg.equal);
  CHECK(tg.lhs == Rat(0));
}
