#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "corpus.hpp"
#include "orbt/heat.hpp"
#include "orbt/io.hpp"

using namespace orbt;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "orbt-io-tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("presentation text parses into the validated structure") {
  std::string text =
      "# a circle\n"
      "kind flat\n"
      "dimension 1\n"
      "lattice 1\n"
      "gram 9/4\n"
      "element 1 ; 0\n";
  auto p = parse_presentation_text(text);
  CHECK(p.kind == PresentationKind::FlatCrystallographic);
  CHECK(p.metric_gram[0][0] == Rat(9, 4));
  auto cp = validate_presentation(p);
  CHECK(cp.dim() == 1);

  CHECK_THROWS_AS(parse_presentation_text("dimension 1\n"), Error);
  CHECK_THROWS_AS(parse_presentation_text("kind flat\nwhatever 3\n"), Error);
  CHECK_THROWS_AS(parse_presentation_text("kind flat\nelement 1/2 ; 0\n"), Error);
}

TEST_CASE("rank-one presentation text parses matrices") {
  std::string text =
      "kind rank-one\n"
      "length 3/2\n"
      "u0 1,0\n"
      "h 1,0\n";
  auto p = parse_presentation_text(text);
  CHECK(p.kind == PresentationKind::RankOne);
  CHECK(p.dimension == 1);
  CHECK(p.rank_one.ell == Rat(3, 2));
  CHECK(p.rank_one.h.size() == 1);
}

TEST_CASE("representation JSON round trips") {
  auto p = load_presentation(corpus::pres_path("pillowcase.cfg"));
  auto cp = validate_presentation(p);
  auto cr = corpus::rep(cp, "pillow-halfchar.rep");

  Json j = rep_json(p, cr.rep);
  std::string path = temp_path("halfchar-copy.json");
  {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
  }
  HolonomyRep back = load_rep_json(path, p);
  REQUIRE(back.lattice.size() == cr.rep.lattice.size());
  for (std::size_t i = 0; i < back.lattice.size(); ++i)
    CHECK((back.lattice[i] - cr.rep.lattice[i]).norm() == 0.0);
  REQUIRE(back.coset.size() == cr.rep.coset.size());
  for (std::size_t i = 0; i < back.coset.size(); ++i)
    CHECK((back.coset[i] - cr.rep.coset[i]).norm() == 0.0);

  CHECK(j.dump() == rep_json(p, back).dump());
}

TEST_CASE("rank-one representation JSON round trips") {
  auto p = load_presentation(corpus::pres_path("rankone-z2.cfg"));
  auto cp = validate_presentation(p);
  auto cr = corpus::rep(cp, "rankone-z2-beta.rep");
  Json j = rep_json(p, cr.rep);
  std::string path = temp_path("beta-copy.json");
  {
    std::ofstream out(path);
    out << j.dump() << "\n";
  }
  HolonomyRep back = load_rep_json(path, p);
  CHECK((back.g1 - cr.rep.g1).norm() == 0.0);
  REQUIRE(back.h.size() == cr.rep.h.size());
  for (std::size_t i = 0; i < back.h.size(); ++i) CHECK((back.h[i] - cr.rep.h[i]).norm() == 0.0);
}

TEST_CASE("spectrum cache round trips and rejects stale keys") {
  auto cp = corpus::presentation("pillowcase.cfg");
  auto cr = corpus::rep(cp, "pillow-trivial.rep");
  auto st = flat_spectrum(cp, cr, 90.0);

  std::string csv = temp_path("pillow-spec.csv");
  std::string side = temp_path("pillow-spec.json");
  save_spectrum_csv(st, csv, side, cp.hash, cr.hash);

  SpectrumTable back;
  REQUIRE(load_spectrum_csv(back, csv, side, cp.hash, cr.hash, st.cutoff));
  CHECK(back.betti == st.betti);
  REQUIRE(back.shells.size() == st.shells.size());
  for (double t : {0.2, 1.0})
    for (int q = 0; q <= 2; ++q)
      CHECK(heat_trace_spectral(back, q, t) == heat_trace_spectral(st, q, t));

  SpectrumTable other;
  CHECK(!load_spectrum_csv(other, csv, side, cp.hash, cr.hash + 1, st.cutoff));
  CHECK(!load_spectrum_csv(other, csv, side, cp.hash, cr.hash, st.cutoff + 1.0));
  CHECK(!load_spectrum_csv(other, csv, side, "nope", cr.hash, st.cutoff));
}

TEST_CASE("cache keys are deterministic") {
  CHECK(cache_key("abc", 7, 100.0) == cache_key("abc", 7, 100.0));
  CHECK(cache_key("abc", 7, 100.0) != cache_key("abc", 8, 100.0));
}
