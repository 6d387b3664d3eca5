#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "orbt/bundle.hpp"

using namespace orbt;

namespace {

double round_trip_deviation(const CheckedPresentation& cp, const CheckedRep& cr) {
  FlatBundleCocycle b = bundle_from_rep(cp, cr);
  Atlas at = b.atlas;
  auto loops = generator_loops(cp, at);
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

}  // namespace

TEST_CASE("transport of a generator loop is the generator image") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
  auto b = bundle_from_rep(cp, cr);
  auto loops = generator_loops(cp, b.atlas);
  REQUIRE(loops.size() == 1);
  CMat tau = parallel_transport(b, loops[0]);
  CHECK((tau - cr.rep.lattice[0]).norm() == 0.0);
}

TEST_CASE("constant path transports trivially") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-pi.rep");
  auto b = bundle_from_rep(cp, cr);
  GPath c = constant_path(b.atlas, b.atlas.identity_chart(), base_point(1));
  CMat tau = parallel_transport(b, c);
  CHECK((tau - CMat::Identity(1, 1)).norm() == 0.0);
}

TEST_CASE("subdivision does not change transport") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-pi.rep");
  auto b = bundle_from_rep(cp, cr);
  auto loops = generator_loops(cp, b.atlas);
  GPath c = loops[0];
  GPath sub = c;
  REQUIRE(c.segments.size() == 2);
  const auto& pts = c.segments[1].points;
  RatVec mid(1, (pts.front()[0] + pts.back()[0]) / 2);
  sub.segments[1].points = {pts.front(), mid};
  sub.segments.push_back(PathSegment{c.segments[1].chart, {mid, pts.back()}});
  sub.arrows.push_back(germ_identity(1));
  std::swap(sub.arrows[2], sub.arrows[3]);
  sub.partition = {Rat(0), Rat(1, 3), Rat(2, 3), Rat(1)};
  CHECK((parallel_transport(b, sub) - parallel_transport(b, c)).norm() == 0.0);
}

TEST_CASE("inverse loop composes to the identity transport") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
  auto b = bundle_from_rep(cp, cr);
  auto loops = generator_loops(cp, b.atlas);
  GPath inv = reverse_path(cp, loops[0]);
  GPath loop = compose_paths(cp, loops[0], inv);
  CMat tau = parallel_transport(b, loop);
  CHECK((tau - CMat::Identity(1, 1)).norm() < 1e-15);
}

TEST_CASE("composed generator loops transport to the product") {
  auto cp = corpus::presentation("circle.cfg");
  auto cr = corpus::rep(cp, "circle-theta-2pi3.rep");
  auto b = bundle_from_rep(cp, cr);
  auto loops = generator_loops(cp, b.atlas);
  GPath two = compose_paths(cp, loops[0], loops[0]);
  CMat tau = parallel_transport(b, two);
  CMat expect = cr.rep.lattice[0] * cr.rep.lattice[0];
  CHECK((tau - expect).norm() < 1e-15);
}

TEST_CASE("round trips recover the representation") {
  auto circle = corpus::presentation("circle.cfg");
  CHECK(round_trip_deviation(circle, corpus::rep(circle, "circle-trivial.rep")) == 0.0);
  CHECK(round_trip_deviation(circle, corpus::rep(circle, "circle-theta-pi.rep")) == 0.0);
  CHECK(round_trip_deviation(circle, corpus::rep(circle, "circle-theta-2pi3.rep")) == 0.0);

  auto interval = corpus::presentation("interval.cfg");
  CHECK(round_trip_deviation(interval, corpus::rep(interval, "interval-sign.rep")) == 0.0);
  CHECK(round_trip_deviation(interval, corpus::rep(interval, "interval-dihedral.rep")) == 0.0);

  auto pillow = corpus::presentation("pillowcase.cfg");
  CHECK(round_trip_deviation(pillow, corpus::rep(pillow, "pillow-halfchar.rep")) == 0.0);

  auto t3z2 = corpus::presentation("torus3-z2.cfg");
  CHECK(round_trip_deviation(t3z2, corpus::rep(t3z2, "torus3-z2-trivial.rep")) == 0.0);
}

TEST_CASE("equivalence testing") {
  auto circle = corpus::presentation("circle.cfg");
  auto r1 = corpus::rep(circle, "circle-theta-2pi3.rep");
  CHECK(reps_equivalent(circle, r1.rep, r1.rep));

  HolonomyRep conj = r1.rep;
  conj.lattice[0] = r1.rep.lattice[0].adjoint();  // the opposite character
  CHECK(!reps_equivalent(circle, r1.rep, conj));

  auto interval = corpus::presentation("interval.cfg");
  auto dih = corpus::rep(interval, "interval-dihedral.rep");
  CMat u(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  u << Cplx(s, 0), Cplx(s, 0), Cplx(s, 0), Cplx(-s, 0);
  HolonomyRep moved = dih.rep;
  for (auto& m : moved.lattice) m = u * m * u.adjoint();
  for (auto& m : moved.coset) m = u * m * u.adjoint();
  CHECK(reps_equivalent(interval, dih.rep, moved));
}

TEST_CASE("properization restricts to the isotropy invariants") {
  auto cp = corpus::presentation("rankone-z2.cfg");
  auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
  auto b = bundle_from_rep(cp, cr);
  CHECK(!b.proper);
  auto pb = properize(b);
  CHECK(pb.proper);
  CHECK(pb.rank == 1);
  auto loops = generator_loops(cp, b.atlas);
  CMat q = parallel_transport(pb, loops[0]);
  CHECK(std::abs(q(0, 0) - Cplx(std::cos(2 * M_PI / 5), std::sin(2 * M_PI / 5))) < 1e-12);

  auto plain = bundle_from_rep(corpus::presentation("circle.cfg"),
                               corpus::rep(corpus::presentation("circle.cfg"), "circle-theta-pi.rep"));
  CHECK(plain.proper);
  auto same = properize(plain);
  CHECK(same.rank == plain.rank);
}
