#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "schottky/error.hpp"
#include "schottky/group.hpp"

using namespace schottky;

namespace {

const ValidationCheck& check_named(const ValidationReport& report, const std::string& name) {
  for (const auto& c : report.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  throw;
}

}  // namespace

TEST_CASE("builder reproduces the hand-computed first generator") {
  const SchottkyData g = reference_group();
  REQUIRE(g.r == 2);
  const Mat2& m = g.generator(1);
  CHECK(m.a == doctest::Approx(-6.0));
  CHECK(m.b == doctest::Approx(5.5));
  CHECK(m.c == doctest::Approx(2.0));
  CHECK(m.d == doctest::Approx(-2.0));
  CHECK(m.det() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("builder output passes every validation check") {
  const ValidationReport report = validate(reference_group());
  CHECK(report.ok());
  CHECK(report.failures().empty());
  const SchottkyData other = build_from_disks({-4.0, -1.0, 1.5, 5.0}, {0.7, 0.4, 1.0, 0.3});
  CHECK(validate(other).ok());
}

TEST_CASE("partner generators are projective inverses") {
  const SchottkyData g = build_from_disks({-4.0, -1.0, 1.5, 5.0}, {0.7, 0.4, 1.0, 0.3});
  for (int a = 1; a <= 4; ++a) {
    const int partner = (a + 1) % 4 + 1;
    CHECK(projective_distance(g.generator(partner) * g.generator(a), Mat2::identity()) < 1e-10);
  }
}

TEST_CASE("generator maps partner boundary circle onto its own circle and the outside inward") {
  const SchottkyData g = reference_group();
  for (int a = 1; a <= 4; ++a) {
    const int partner = (a + 1) % 4 + 1;
    for (int k = 0; k < 16; ++k) {
      const Complex z = g.center(partner) + g.radius(partner) * std::polar(1.0, 2 * std::numbers::pi * k / 16);
      CHECK(std::abs(std::abs(g.generator(a).apply(z) - g.center(a)) - g.radius(a)) < 1e-12);
    }
    CHECK(std::abs(g.generator(a).apply(Complex(0.0, 10.0)) - g.center(a)) < g.radius(a));
  }
}

TEST_CASE("overlapping or degenerate disks are rejected") {
  try {
    build_from_disks({-1.0, 1.0, 0.2, 3.0}, {0.5, 0.5, 0.5, 0.5});
    FAIL("expected DisjointnessViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisjointnessViolation);
  }
  try {
    build_from_disks({-3.0, -1.0, 1.0, 3.0}, {0.5, 0.0, 0.5, 0.5});
    FAIL("expected DegenerateRadius");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateRadius);
  }
  CHECK_THROWS_AS(build_from_disks({-1.0, 1.0}, {0.5, 0.5}), Error);
}

TEST_CASE("validation flags a broken pairing and a non-unit determinant") {
  SchottkyData g = reference_group();
  g.generators[2] = Mat2::identity();
  const ValidationReport broken = validate(g);
  CHECK_FALSE(broken.ok());
  CHECK_FALSE(check_named(broken, "boundary_pairing").passed);

  SchottkyData h = reference_group();
  const double k = std::sqrt(2.0);
  Mat2& m = h.generators[0];
  m = {m.a * k, m.b * k, m.c * k, m.d * k};
  const ValidationCheck& det = check_named(validate(h), "unit_determinant");
  CHECK_FALSE(det.passed);
  CHECK(det.residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mobius jet of the identity") {
  const MobiusJet j = mobius_jet(Mat2::identity(), Complex(0.0, 1.0));
  CHECK(std::abs(j.value - Complex(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(j.first - 1.0) < 1e-15);
  CHECK(std::abs(j.log_second) < 1e-15);
  CHECK(std::abs(j.log_third) < 1e-15);
}

TEST_CASE("mobius jet contracts from D_2 into D_1") {
  const SchottkyData g = reference_group();
  // The pole of gamma_1 is the center of D_3, so sample the center of D_2.
  CHECK_THROWS_AS(mobius_jet(g.generator(1), Complex(g.center(3), 0.0)), Error);
  const MobiusJet j = mobius_jet(g.generator(1), Complex(g.center(2), 0.0));
  CHECK(std::abs(j.first) > 0.0);
  CHECK(std::abs(j.first) < 1.0);
}

TEST_CASE("mobius jet derivatives agree with finite differences") {
  const SchottkyData g = reference_group();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const int a = 1 + trial % 4;
    const int partner = (a + 1) % 4 + 1;
    const Complex z = g.center(partner) + Complex(u(rng), u(rng));
    const Mat2& m = g.generator(a);
    const MobiusJet j = mobius_jet(m, z);
    const Complex fd_first = (m.apply(z + h) - m.apply(z - h)) / (2 * h);
    CHECK(std::abs(fd_first - j.first) <= 1e-6 * std::abs(j.first));
    const Complex second = (mobius_jet(m, z + h).first - mobius_jet(m, z - h).first) / (2 * h);
    CHECK(std::abs(second / j.first - j.log_second) <= 1e-6 * std::max(1.0, std::abs(j.log_second)));
    const Complex third =
        (mobius_jet(m, z + h).log_second * mobius_jet(m, z + h).first -
         mobius_jet(m, z - h).log_second * mobius_jet(m, z - h).first) / (2 * h);
    CHECK(std::abs(third / j.first - j.log_third) <= 1e-6 * std::max(1.0, std::abs(j.log_third)));
  }
}

TEST_CASE("jet of the partner generator undoes the generator") {
  const SchottkyData g = reference_group();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  int tested = 0;
  while (tested < 100) {
    const Complex z(u(rng), u(rng));
    const int a = 1 + tested % 4;
    const int partner = (a + 1) % 4 + 1;
    if (std::abs(z - g.center(a)) <= g.radius(a) || std::abs(z - g.center(partner)) <= g.radius(partner)) continue;
    const Complex w = mobius_jet(g.generator(a), z).value;
    CHECK(std::abs(mobius_jet(g.generator(partner), w).value - z) < 1e-9 * std::max(1.0, std::abs(z)));
    ++tested;
  }
}

TEST_CASE("pole evaluation is an error") {
  const SchottkyData g = reference_group();
  const Mat2& m = g.generator(1);
  try {
    mobius_jet(m, Complex(-m.d / m.c, 0.0));
    FAIL("expected PoleEvaluation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleEvaluation);
    CHECK(e.category() == ErrorCategory::Numerical);
  }
}

TEST_CASE("group JSON round trip keeps the generators") {
  const SchottkyData g = reference_group();
  const SchottkyData back = group_from_json(group_to_json(g));
  REQUIRE(back.r == g.r);
  for (int a = 1; a <= 4; ++a) CHECK(projective_distance(back.generator(a), g.generator(a)) == 0.0);
  const SchottkyData built = group_from_json(nlohmann::json::parse(R"({"r":2,"centers":[-3,-1,1,3],"radii":[0.5,0.5,0.5,0.5]})"));
  CHECK(projective_distance(built.generator(1), g.generator(1)) < 1e-15);
}
