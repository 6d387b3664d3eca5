#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "orbt/circle_numeric.hpp"

using namespace orbt;

namespace {

std::vector<CircleProfile> test_profiles() {
  return {
      {[](double) { return 1.0; }, "round"},
      {[](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, "bump"},
      {[](double x) { return 1.0 / (1.1 + 0.5 * std::sin(2 * M_PI * x)); }, "wobble"},
  };
}

}  // namespace

TEST_CASE("round profile reproduces the exact twisted ladder") {
  CircleProfile round{[](double) { return 1.0; }, "round"};
  auto cd = circle_spectrum_numeric(round, 0.5, 64);
  CHECK(std::abs(cd.length - 1.0) < 1e-12);
  for (int j = 0; j < 6; ++j) {
    double expect = 4 * M_PI * M_PI * (j / 2 + 0.5) * (j / 2 + 0.5);
    int m = (j % 2 == 0) ? (j / 2) : -(j / 2 + 1);
    expect = 4 * M_PI * M_PI * (m + 0.5) * (m + 0.5);
    CHECK(std::abs(cd.eigenvalues(j) - expect) < 1e-8 * (1.0 + expect));
  }
}

TEST_CASE("zero and one form discretizations are dual") {
  CircleProfile bump{[](double x) { return 1.0 + 0.3 * std::cos(2 * M_PI * x); }, "bump"};
  auto cd = circle_spectrum_numeric(bump, 0.25, 96);
  auto one = circle_one_form_spectrum(bump, 0.25, 96, 8);
  for (int j = 0; j < 8; ++j)
    CHECK(std::abs(cd.eigenvalues(j) - one[j]) < 1e-6 * (1.0 + std::abs(one[j])));
}

TEST_CASE("numeric torsion is profile independent") {
  auto profiles = test_profiles();

  SECTION("theta = pi") {
    auto r = profile_invariance_check(profiles, M_PI, 200);
    REQUIRE(r.log_t.size() == 3);
    CHECK(r.max_deviation < 1e-6);
    CHECK(r.closed_form_dev < 1e-6);
    CHECK(std::abs(r.log_t[0] - std::log(2.0)) < 1e-8);
  }

  SECTION("theta = 2 pi / 3") {
    auto r = profile_invariance_check(profiles, 2 * M_PI / 3, 200);
    CHECK(r.max_deviation < 1e-6);
    CHECK(std::abs(r.log_t[0] - 0.5 * std::log(3.0)) < 1e-8);
  }
}

TEST_CASE("numeric torsion reports its error estimate") {
  CircleProfile wob{[](double x) { return 1.0 / (1.1 + 0.5 * std::sin(2 * M_PI * x)); }, "wobble"};
  auto t = circle_numeric_torsion(wob, M_PI, 200);
  CHECK(t.error_estimate < 1e-6);
  CHECK(std::abs(t.log_t - std::log(2.0)) < 1e-6);
  CHECK_THROWS_AS(circle_numeric_torsion(wob, 0.0, 64), Error);
}

TEST_CASE("profiles must stay positive") {
  CircleProfile bad{[](double x) { return std::cos(2 * M_PI * x); }, "bad"};
  CHECK_THROWS_AS(circle_spectrum_numeric(bad, 0.5, 32), Error);
}
